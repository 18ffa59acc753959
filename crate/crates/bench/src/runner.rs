//! Benchmark sweeps: generate instances, solve them with each solver, and
//! write records, shifted geometric means, profiles and the LDL study.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use forge_core::{Settings, Solver, Status};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::external::{run_generated, ExternalError};
use crate::ldl_compare::{ldl_compare, LdlRow};
use crate::metrics::{normalize, performance_profiles, shifted_geometric_mean, Profiles};
use crate::problems::{Class, ALL_CLASSES};
use crate::svg::profiles_svg;

/// Shift of the geometric mean, in seconds.
pub const SGM_SHIFT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SolverKind {
    /// The library solver, in process.
    Library,
    /// A solver emitted for the instance, built and run with cargo.
    Generated,
}

impl SolverKind {
    pub fn id(self) -> &'static str {
        match self {
            SolverKind::Library => "library",
            SolverKind::Generated => "generated",
        }
    }
}

impl FromStr for SolverKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "library" => Ok(SolverKind::Library),
            "generated" => Ok(SolverKind::Generated),
            _ => Err(format!("unknown solver `{s}`")),
        }
    }
}

/// Which sizes of each class to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sizes {
    /// The first `n` sizes of each class.
    First(usize),
    All,
}

impl Sizes {
    pub fn of(self, class: Class) -> &'static [usize] {
        let s = class.sizes();
        match self {
            Sizes::First(n) => &s[..n.min(s.len())],
            Sizes::All => s,
        }
    }
}

impl FromStr for Sizes {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "small" => Ok(Sizes::First(1)),
            "all" => Ok(Sizes::All),
            n => n.parse().map(Sizes::First).map_err(|_| format!("sizes must be `small`, `all` or a count, got `{s}`")),
        }
    }
}

/// One solve of one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub problem: String,
    pub class: String,
    /// `nnz(A) + nnz(G) + nnz(triu P)`
    pub size: usize,
    pub solver: String,
    pub status: String,
    /// Fastest of the repeats; the class failure cap for failed solves.
    pub runtime_s: f64,
    pub iterations: usize,
}

impl BenchRecord {
    pub fn solved(&self) -> bool {
        self.status == Status::Optimal.as_str()
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub classes: Vec<Class>,
    pub sizes: Sizes,
    pub instances: usize,
    pub repeats: usize,
    pub solvers: Vec<SolverKind>,
    pub seed: u64,
    pub settings: Settings,
    /// Library solves run one at a time when set; otherwise instances are
    /// solved in parallel. Generated solvers always run one at a time.
    pub timing_strict: bool,
    /// Horizons of the LDL study; empty skips it.
    pub ldl_horizons: Vec<usize>,
    /// Where reports and generated crates go; `None` writes nothing.
    pub out_dir: Option<PathBuf>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            classes: ALL_CLASSES.to_vec(),
            sizes: Sizes::First(1),
            instances: 20,
            repeats: 10,
            solvers: vec![SolverKind::Library],
            seed: 0,
            settings: Settings::default(),
            timing_strict: false,
            ldl_horizons: Vec::new(),
            out_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SgmRow {
    pub class: String,
    pub solver: String,
    pub sgm: f64,
    /// `sgm / min over solvers`, within the class.
    pub normalized: f64,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub sgm: Vec<SgmRow>,
    /// Solver ids in profile order.
    pub solvers: Vec<String>,
    pub profiles: Option<Profiles>,
    pub ldl: Vec<LdlRow>,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv error on {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error(transparent)]
    External(#[from] ExternalError),
}

#[derive(Debug, Clone, Copy)]
struct Job {
    class: Class,
    size: usize,
    instance: usize,
    seed: u64,
}

impl Job {
    fn id(&self) -> String {
        format!("{}-{}-{:02}", self.class, self.size, self.instance)
    }
}

fn jobs(cfg: &BenchConfig) -> Vec<Job> {
    let mut out = Vec::new();
    for &class in &cfg.classes {
        for &size in cfg.sizes.of(class) {
            for instance in 0..cfg.instances {
                out.push(Job { class, size, instance, seed: cfg.seed.wrapping_add(instance as u64) });
            }
        }
    }
    out
}

fn record(job: &Job, size: usize, solver: SolverKind, status: &str, runtime: f64, iterations: usize) -> BenchRecord {
    let solved = status == Status::Optimal.as_str();
    BenchRecord {
        problem: job.id(),
        class: job.class.to_string(),
        size,
        solver: solver.id().to_string(),
        status: status.to_string(),
        runtime_s: if solved { runtime.max(f64::MIN_POSITIVE) } else { job.class.failure_cap() },
        iterations,
    }
}

/// Solves with the library `repeats` times and keeps the fastest solve
/// phase; analysis is excluded, as it is for generated solvers.
fn run_library(job: &Job, cfg: &BenchConfig) -> BenchRecord {
    let prob = job.class.generate(job.size, job.seed);
    let size = prob.size_metric();
    let mut solver = match Solver::new(prob, cfg.settings) {
        Ok(s) => s,
        Err(_) => return record(job, size, SolverKind::Library, Status::InvalidData.as_str(), 0.0, 0),
    };
    let mut best = f64::INFINITY;
    let mut sol = solver.solve();
    for _ in 0..cfg.repeats.max(1) {
        sol = solver.solve();
        best = best.min(sol.solve_time);
    }
    record(job, size, SolverKind::Library, sol.status.as_str(), best, sol.iterations)
}

fn run_external(job: &Job, cfg: &BenchConfig, work: &Path) -> BenchRecord {
    let prob = job.class.generate(job.size, job.seed);
    let size = prob.size_metric();
    let name = format!("gen_{}", job.id().replace('-', "_"));
    match run_generated(&prob, &name, work, cfg.repeats.max(1)) {
        Ok(r) => {
            // The emitted binary prints the status enum's variant name.
            let status = match r.status.as_str() {
                "Optimal" => Status::Optimal.as_str(),
                "MaxIters" => Status::MaxIters.as_str(),
                "NumericalError" => Status::NumericalError.as_str(),
                _ => "failed",
            };
            record(job, size, SolverKind::Generated, status, r.solve_time, r.iterations)
        }
        Err(_) => record(job, size, SolverKind::Generated, "build_failed", 0.0, 0),
    }
}

/// Runtimes and failure flags, per solver, per class.
type ByClass<'a> = BTreeMap<&'a str, BTreeMap<&'a str, (Vec<f64>, Vec<bool>)>>;

/// Per class and solver, the shifted geometric mean of runtimes, failures
/// charged the class cap.
pub fn sgm_table(records: &[BenchRecord]) -> Vec<SgmRow> {
    let mut by_class: ByClass = BTreeMap::new();
    for r in records {
        let e = by_class.entry(&r.class).or_default().entry(&r.solver).or_default();
        e.0.push(r.runtime_s);
        e.1.push(!r.solved());
    }
    let mut rows = Vec::new();
    for (class, solvers) in by_class {
        let cap = class.parse::<Class>().map_or(crate::problems::FAILURE_CAP, Class::failure_cap);
        let g: Vec<f64> = solvers.values().map(|(t, f)| shifted_geometric_mean(t, f, SGM_SHIFT, cap)).collect();
        for ((solver, _), (g, r)) in solvers.iter().zip(g.iter().zip(normalize(&g))) {
            rows.push(SgmRow { class: class.to_string(), solver: solver.to_string(), sgm: *g, normalized: r });
        }
    }
    rows
}

/// Profiles over the problems every solver attempted.
pub fn profiles(records: &[BenchRecord]) -> (Vec<String>, Option<Profiles>) {
    let mut table: BTreeMap<&str, BTreeMap<&str, &BenchRecord>> = BTreeMap::new();
    for r in records {
        table.entry(&r.solver).or_default().insert(&r.problem, r);
    }
    let solvers: Vec<String> = table.keys().map(|s| s.to_string()).collect();
    let Some(first) = table.values().next() else {
        return (solvers, None);
    };
    let common: Vec<&str> = first.keys().copied().filter(|p| table.values().all(|m| m.contains_key(p))).collect();
    if common.is_empty() {
        return (solvers, None);
    }
    let times: Vec<Vec<f64>> = table.values().map(|m| common.iter().map(|p| m[p].runtime_s).collect()).collect();
    let failed: Vec<Vec<bool>> = table.values().map(|m| common.iter().map(|p| !m[p].solved()).collect()).collect();
    (solvers, Some(performance_profiles(&times, &failed)))
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), BenchError> {
    let csv_err = |source| BenchError::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|source| BenchError::Io { path: path.to_path_buf(), source })
}

/// Runs the sweep. Individual failures become records with a failure
/// status; only report i/o errors and a failed LDL study abort.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport, BenchError> {
    let jobs = jobs(cfg);
    let mut records = Vec::new();
    for &solver in &cfg.solvers {
        match solver {
            SolverKind::Library if cfg.timing_strict => records.extend(jobs.iter().map(|j| run_library(j, cfg))),
            SolverKind::Library => {
                let par: Vec<_> = jobs.par_iter().map(|j| run_library(j, cfg)).collect();
                records.extend(par);
            }
            SolverKind::Generated => {
                let work = match &cfg.out_dir {
                    Some(d) => d.join("generated"),
                    None => std::env::temp_dir().join("forge-bench-generated"),
                };
                records.extend(jobs.iter().map(|j| run_external(j, cfg, &work)));
            }
        }
    }
    let sgm = sgm_table(&records);
    let (solvers, prof) = profiles(&records);
    let ldl = match (&cfg.out_dir, cfg.ldl_horizons.is_empty()) {
        (_, true) => Vec::new(),
        (Some(d), false) => ldl_compare(&cfg.ldl_horizons, cfg.seed, &d.join("ldl"), 21)?,
        (None, false) => ldl_compare(&cfg.ldl_horizons, cfg.seed, &std::env::temp_dir().join("forge-bench-ldl"), 21)?,
    };
    let report = BenchReport { records, sgm, solvers, profiles: prof, ldl };
    if let Some(dir) = &cfg.out_dir {
        write_report(&report, dir)?;
    }
    Ok(report)
}

pub fn write_report(report: &BenchReport, dir: &Path) -> Result<(), BenchError> {
    std::fs::create_dir_all(dir).map_err(|source| BenchError::Io { path: dir.to_path_buf(), source })?;
    write_csv(&dir.join("records.csv"), &report.records)?;
    write_csv(&dir.join("sgm.csv"), &report.sgm)?;
    if !report.ldl.is_empty() {
        write_csv(&dir.join("ldl_compare.csv"), &report.ldl)?;
    }
    if let Some(p) = &report.profiles {
        let path = dir.join("profiles.svg");
        std::fs::write(&path, profiles_svg(&report.solvers, p)).map_err(|source| BenchError::Io { path, source })?;
    }
    Ok(())
}
