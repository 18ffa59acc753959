//! Long-only Markowitz portfolio with a factor covariance `F F^T + D`,
//! where the factor exposures `y = F^T x` are variables.

use forge_core::{ConeSpec, ProblemData, Solution, SparseSym};

use super::{check, Class, Tri};
use crate::rng::Sampler;

pub const ASSETS_PER_FACTOR: usize = 100;
pub const DENSITY: f64 = 0.5;
pub const GAMMA: f64 = 1.0;

/// Columns of the weights `x` and the factor exposures `y`.
#[derive(Debug, Clone, Copy)]
pub struct Layout {
    pub factors: usize,
}

impl Layout {
    pub fn assets(&self) -> usize {
        ASSETS_PER_FACTOR * self.factors
    }
    pub fn y(&self, j: usize) -> usize {
        self.assets() + j
    }
    pub fn n(&self) -> usize {
        self.assets() + self.factors
    }
}

/// `D` diagonal is `|N(0,1)|`: a variance must be nonnegative. `mu` has
/// standard deviation `sqrt(k)`; `F` about half nonzeros, standard normal.
pub fn gen_portfolio(factors: usize, seed: u64) -> ProblemData {
    assert!(factors >= 1, "need at least one factor");
    let mut rng = Sampler::new(seed, Class::Portfolio.stream());
    let lay = Layout { factors };
    let (na, n) = (lay.assets(), lay.n());
    let d: Vec<f64> = (0..na).map(|_| rng.normal(0.0, 1.0).abs()).collect();
    let mu: Vec<f64> = (0..na).map(|_| rng.normal(0.0, (factors as f64).sqrt())).collect();

    // Rows 0..k: F^T x - y = 0. Row k: sum x = 1.
    let mut am = Tri::new(factors + 1, n);
    for i in 0..na {
        for j in 0..factors {
            if rng.bernoulli(DENSITY) {
                am.push(j, i, rng.normal(0.0, 1.0));
            }
        }
        am.push(factors, i, 1.0);
    }
    for j in 0..factors {
        am.push(j, lay.y(j), -1.0);
    }
    let mut b = vec![0.0; factors + 1];
    b[factors] = 1.0;

    let mut p: Vec<_> = d.iter().enumerate().map(|(i, &di)| (i, i, 2.0 * di)).collect();
    p.extend((0..factors).map(|j| (lay.y(j), lay.y(j), 2.0)));
    let mut c = vec![0.0; n];
    for i in 0..na {
        c[i] = -mu[i] / GAMMA;
    }
    let mut g = Tri::new(na, n);
    for i in 0..na {
        g.push(i, i, -1.0);
    }
    ProblemData {
        n,
        p: factors + 1,
        P: SparseSym::from_triplets(n, &p).expect("diagonal entries are distinct"),
        c,
        A: am.finish(),
        b,
        G: g.finish(),
        h: vec![0.0; na],
        cones: ConeSpec::orthant(na),
    }
}

/// The weights are nonnegative and sum to one.
pub(crate) fn audit(factors: usize, sol: &Solution, tol: f64) -> Result<(), String> {
    let na = Layout { factors }.assets();
    let x = &sol.x[..na];
    let total: f64 = x.iter().sum();
    check((total - 1.0).abs() <= tol, || format!("weights sum to {total}"))?;
    let low = x.iter().copied().fold(f64::INFINITY, f64::min);
    check(low >= -tol, || format!("negative weight {low}"))
}
