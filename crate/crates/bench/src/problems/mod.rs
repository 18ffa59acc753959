//! Benchmark problem classes and the LQR KKT matrices used for the
//! factorization study.
//!
//! Every generator is a pure function of its size and seed. Each class keeps
//! a `Layout` that maps named variables to columns, which the audits use to
//! read a solution back in model terms.

pub mod lasso;
pub mod lcvx;
pub mod lqr;
pub mod oscmass;
pub mod portfolio;
pub mod rkf;

use std::fmt;
use std::str::FromStr;

use forge_core::{ProblemData, Solution, SparseMat};

pub use lasso::gen_group_lasso;
pub use lcvx::gen_lcvx;
pub use lqr::{lqr_kkt, LqrKkt};
pub use oscmass::gen_oscillating_masses;
pub use portfolio::gen_portfolio;
pub use rkf::{gen_robust_kalman, gen_robust_kalman_noiseless};

/// Runtime charged to a failed solve in the benchmark classes, in seconds.
pub const FAILURE_CAP: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    Rkf,
    Lcvx,
    Lasso,
    Portfolio,
    Oscmass,
}

pub const ALL_CLASSES: [Class; 5] = [Class::Rkf, Class::Lcvx, Class::Lasso, Class::Portfolio, Class::Oscmass];

impl Class {
    pub fn name(self) -> &'static str {
        match self {
            Class::Rkf => "rkf",
            Class::Lcvx => "lcvx",
            Class::Lasso => "lasso",
            Class::Portfolio => "portfolio",
            Class::Oscmass => "oscmass",
        }
    }

    /// Size parameters in increasing order: timesteps for the control
    /// problems, groups for lasso, factors for portfolio.
    pub fn sizes(self) -> &'static [usize] {
        match self {
            Class::Rkf => &[25, 50, 75, 125, 175, 225, 300, 375, 450, 500],
            Class::Lcvx => &[15, 50, 75, 100, 125, 150, 200, 250, 300, 350],
            Class::Lasso => &[1, 2, 3, 4, 5, 8, 10, 12, 14, 16],
            Class::Portfolio => &[2, 4, 6, 8, 10, 15, 20, 25, 30, 35],
            Class::Oscmass => &[8, 20, 32, 44, 56, 76, 96, 116, 136, 156],
        }
    }

    pub fn smallest(self) -> usize {
        self.sizes()[0]
    }

    pub fn failure_cap(self) -> f64 {
        FAILURE_CAP
    }

    /// Sampler stream; distinct per class so instances of one class do not
    /// depend on how another consumes randomness.
    pub(crate) fn stream(self) -> u64 {
        self as u64 + 1
    }

    pub fn generate(self, size: usize, seed: u64) -> ProblemData {
        match self {
            Class::Rkf => gen_robust_kalman(size, seed),
            Class::Lcvx => gen_lcvx(size, seed),
            Class::Lasso => gen_group_lasso(size, seed),
            Class::Portfolio => gen_portfolio(size, seed),
            Class::Oscmass => gen_oscillating_masses(size, seed),
        }
    }

    /// Checks a solution against the model it came from: cone membership of
    /// `s` and `z`, plus the class-specific property. `tol` is absolute, or
    /// relative to the magnitude of the quantity compared where that is
    /// larger than one.
    pub fn audit(self, size: usize, prob: &ProblemData, sol: &Solution, tol: f64) -> Result<(), String> {
        audit_cones(prob, sol, tol)?;
        match self {
            Class::Rkf => rkf::audit(size, prob, sol, tol),
            Class::Lcvx => lcvx::audit(size, sol, tol),
            Class::Lasso => lasso::audit(size, sol, tol),
            Class::Portfolio => portfolio::audit(size, sol, tol),
            Class::Oscmass => oscmass::audit(size, prob, sol, tol),
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Class {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        ALL_CLASSES.into_iter().find(|c| c.name() == s).ok_or_else(|| format!("unknown problem class `{s}`"))
    }
}

/// Smallest cone margin of `v`: the least orthant entry or `u0 - ||u1||`
/// over the second-order blocks. Negative means outside the cone.
pub fn cone_margin(v: &[f64], prob: &ProblemData) -> f64 {
    let l = prob.cones.l;
    let mut margin = v[..l].iter().copied().fold(f64::INFINITY, f64::min);
    let mut off = l;
    for &q in &prob.cones.q {
        let tail = v[off + 1..off + q].iter().map(|x| x * x).sum::<f64>().sqrt();
        margin = margin.min(v[off] - tail);
        off += q;
    }
    margin
}

fn audit_cones(prob: &ProblemData, sol: &Solution, tol: f64) -> Result<(), String> {
    for (name, v) in [("s", &sol.s), ("z", &sol.z)] {
        let m = cone_margin(v, prob);
        if m < -tol {
            return Err(format!("{name} leaves the cone by {:.3e}", -m));
        }
    }
    Ok(())
}

pub(crate) fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

/// `|a - b| <= tol * max(1, |a|, |b|)`
pub(crate) fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Triplet accumulator for constraint matrices.
pub(crate) struct Tri {
    rows: usize,
    cols: usize,
    t: Vec<(usize, usize, f64)>,
}

impl Tri {
    pub fn new(rows: usize, cols: usize) -> Self {
        Tri { rows, cols, t: Vec::new() }
    }

    pub fn push(&mut self, r: usize, c: usize, v: f64) {
        self.t.push((r, c, v));
    }

    pub fn finish(self) -> SparseMat {
        SparseMat::from_triplets(self.rows, self.cols, &self.t).expect("generator emits each entry once")
    }
}
