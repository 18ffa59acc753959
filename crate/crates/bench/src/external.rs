//! Building and running emitted crates with cargo.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::Command;

use forge_codegen::{emit, plan, EmitOptions, GenSpec};
use forge_core::ProblemData;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExternalError {
    #[error("code generation failed: {0}")]
    Generate(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cargo build of {dir} failed:\n{stderr}")]
    Build { dir: PathBuf, stderr: String },
    #[error("runtest output not understood: {0}")]
    Parse(String),
}

/// Cargo from the environment when invoked under cargo, else from `PATH`.
pub fn cargo() -> OsString {
    std::env::var_os("CARGO").unwrap_or_else(|| "cargo".into())
}

/// Builds the crate at `dir` in release mode into `dir/target`.
pub fn build_release(dir: &Path) -> Result<PathBuf, ExternalError> {
    let target = dir.join("target");
    let out = Command::new(cargo())
        .args(["build", "--release", "--offline", "--quiet", "--manifest-path"])
        .arg(dir.join("Cargo.toml"))
        .arg("--target-dir")
        .arg(&target)
        .output()
        .map_err(|source| ExternalError::Io { path: dir.to_path_buf(), source })?;
    if !out.status.success() {
        return Err(ExternalError::Build {
            dir: dir.to_path_buf(),
            stderr: String::from_utf8_lossy(&out.stderr).into(),
        });
    }
    Ok(target.join("release"))
}

/// What the emitted `runtest` binary reports.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub status: String,
    pub iterations: usize,
    pub objective: f64,
    pub solve_time: f64,
}

pub fn parse_runtest(stdout: &str) -> Result<RunReport, ExternalError> {
    let field = |key: &str| {
        stdout
            .lines()
            .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(':')).map(str::trim))
            .ok_or_else(|| ExternalError::Parse(format!("missing `{key}`")))
    };
    let num = |key: &str| -> Result<f64, ExternalError> {
        field(key)?.parse().map_err(|_| ExternalError::Parse(format!("bad `{key}`")))
    };
    Ok(RunReport {
        status: field("status")?.to_string(),
        iterations: num("iterations")? as usize,
        objective: num("objective")?,
        solve_time: num("solve_time_s")?,
    })
}

/// Emits a solver for `prob` as crate `name` under `work`, builds it, and
/// runs its test binary with `repeats` timed solves.
pub fn run_generated(prob: &ProblemData, name: &str, work: &Path, repeats: usize) -> Result<RunReport, ExternalError> {
    let dir = work.join(name);
    let spec = GenSpec {
        problem: prob.clone(),
        out_dir: dir.clone(),
        options: EmitOptions { crate_name: name.to_string(), ..EmitOptions::default() },
    };
    let plan = plan(&spec).map_err(|e| ExternalError::Generate(e.to_string()))?;
    emit(&plan).map_err(|e| ExternalError::Generate(e.to_string()))?;
    let bin = build_release(&dir)?.join("runtest");
    let out = Command::new(&bin)
        .arg(repeats.to_string())
        .output()
        .map_err(|source| ExternalError::Io { path: bin.clone(), source })?;
    // A non-Optimal status exits nonzero but still reports.
    parse_runtest(&String::from_utf8_lossy(&out.stdout))
}
