//! Sparse versus unrolled `LDL^T` factorization on LQR KKT matrices.
//!
//! Both sides factor the same permuted values with the same pivot signs and
//! regularization. The sparse side runs in process; the unrolled kernel is
//! emitted into a small release-built crate that times itself.

use std::fmt::Write as _;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use forge_codegen::emit::render_ldl_module;
use forge_core::sparse::{amd_order, symbolic_factor, LdlFactors, SymbolicFactor};
use serde::Serialize;

use crate::external::{build_release, ExternalError};
use crate::problems::lqr::{lqr_kkt, LqrKkt};

/// Dynamic regularization used by both sides.
pub const EPS_DYN: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LdlRow {
    pub horizon: usize,
    pub dimension: usize,
    pub nnz_l: usize,
    pub sparse_s: f64,
    pub unrolled_s: f64,
    /// `sparse_s / unrolled_s`
    pub ratio: f64,
}

/// A KKT matrix ready to factor: symbolic analysis under AMD, values in
/// permuted order, and pivot signs in permuted order.
pub struct Prepared {
    pub sym: SymbolicFactor,
    pub kx: Vec<f64>,
    pub signs: Vec<f64>,
}

pub fn prepare(lqr: &LqrKkt) -> Prepared {
    let sym = symbolic_factor(&lqr.kkt, amd_order(&lqr.kkt));
    let kx = sym.kperm.vals.clone();
    let signs = sym.perm.apply(&lqr.signs);
    Prepared { sym, kx, signs }
}

/// Median over `samples` of the mean time of `batch` calls to `f`.
pub fn median_seconds(mut f: impl FnMut(), batch: usize, samples: usize) -> f64 {
    let mut t: Vec<f64> = (0..samples)
        .map(|_| {
            let t0 = Instant::now();
            for _ in 0..batch {
                f();
            }
            t0.elapsed().as_secs_f64() / batch as f64
        })
        .collect();
    t.sort_by(f64::total_cmp);
    t[t.len() / 2]
}

/// Calls per timing sample, scaled so each sample takes roughly a
/// millisecond whatever the matrix size.
pub fn batch_for(nnz_l: usize) -> usize {
    (200_000 / (nnz_l + 100)).max(10)
}

pub fn time_sparse(prep: &Prepared, samples: usize) -> f64 {
    let mut f = LdlFactors::new(&prep.sym, prep.signs.clone());
    let batch = batch_for(prep.sym.nnz_l());
    median_seconds(
        || {
            std::hint::black_box(f.refactor(&prep.sym, std::hint::black_box(&prep.kx), EPS_DYN)).ok();
        },
        batch,
        samples,
    )
}

fn f64_array(name: &str, len: &str, v: &[f64]) -> String {
    let mut s = format!("const {name}: [f64; {len}] = [\n");
    for chunk in v.chunks(8) {
        s.push_str("    ");
        for x in chunk {
            let _ = write!(s, "{x:?}, ");
        }
        s.push('\n');
    }
    s.push_str("];\n");
    s
}

/// Sources of a binary crate that times the unrolled factorization of
/// `prep` and prints `factor_s: <median seconds>`.
pub fn timing_crate(prep: &Prepared, samples: usize) -> Vec<(&'static str, String)> {
    let manifest = "[package]\nname = \"ldl_timing\"\nversion = \"0.1.0\"\nedition = \"2021\"\n\n\
                    [profile.release]\ncodegen-units = 1\n\n[workspace]\n"
        .to_string();
    let batch = batch_for(prep.sym.nnz_l());
    let main = format!(
        "mod ldl;\n\nuse std::hint::black_box;\nuse std::time::Instant;\n\nuse ldl::{{KKT_NNZ, L_NNZ, NK}};\n\n{}\n\
         fn main() {{\n    \
             let (mut lx, mut d, mut dinv, mut y) = ([0.0; L_NNZ], [0.0; NK], [0.0; NK], [0.0; NK]);\n    \
             let mut t = Vec::new();\n    \
             for _ in 0..{samples} {{\n        \
                 let t0 = Instant::now();\n        \
                 for _ in 0..{batch} {{\n            \
                     black_box(ldl::ldl_factor(black_box(&KX), &mut lx, &mut d, &mut dinv, &mut y, {EPS_DYN:?}));\n        \
                 }}\n        \
                 t.push(t0.elapsed().as_secs_f64() / {batch}.0);\n    \
             }}\n    \
             t.sort_by(f64::total_cmp);\n    \
             println!(\"factor_s: {{:e}}\", t[t.len() / 2]);\n\
         }}\n",
        f64_array("KX", "KKT_NNZ", &prep.kx)
    );
    vec![
        ("Cargo.toml", manifest),
        ("src/main.rs", main),
        ("src/ldl.rs", render_ldl_module(&prep.sym, &prep.signs, 2000)),
    ]
}

/// Builds and runs the timing crate for `prep` under `dir`.
pub fn time_unrolled(prep: &Prepared, dir: &Path, samples: usize) -> Result<f64, ExternalError> {
    for (rel, text) in timing_crate(prep, samples) {
        let path = dir.join(rel);
        let io = |source| ExternalError::Io { path: path.clone(), source };
        std::fs::create_dir_all(path.parent().unwrap()).map_err(io)?;
        std::fs::write(&path, text).map_err(io)?;
    }
    let bin = build_release(dir)?.join("ldl_timing");
    let out = Command::new(&bin).output().map_err(|source| ExternalError::Io { path: bin.clone(), source })?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    stdout
        .lines()
        .find_map(|l| l.strip_prefix("factor_s:"))
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| ExternalError::Parse(stdout.to_string()))
}

/// One row per horizon, each with its own timing crate under `work`.
pub fn ldl_compare(horizons: &[usize], seed: u64, work: &Path, samples: usize) -> Result<Vec<LdlRow>, ExternalError> {
    horizons
        .iter()
        .map(|&t| {
            let prep = prepare(&lqr_kkt(t, seed));
            let sparse_s = time_sparse(&prep, samples);
            let unrolled_s = time_unrolled(&prep, &work.join(format!("ldl_t{t}")), samples)?;
            Ok(LdlRow {
                horizon: t,
                dimension: prep.sym.n,
                nnz_l: prep.sym.nnz_l(),
                sparse_s,
                unrolled_s,
                ratio: sparse_s / unrolled_s,
            })
        })
        .collect()
}
