//! Regularized KKT matrices of a time-invariant LQR problem with identity
//! costs, six states and three inputs.

use forge_core::SparseSym;

use crate::rng::Sampler;

pub const NX: usize = 6;
pub const NU: usize = 3;
/// Magnitude of the negative (2,2) block.
pub const EPS: f64 = 1e-8;
pub const HORIZONS: [usize; 5] = [5, 15, 50, 75, 100];
const STREAM: u64 = 100;

/// Upper triangle of `[P H^T; H -eps I]` with expected pivot signs.
#[derive(Debug, Clone, PartialEq)]
pub struct LqrKkt {
    pub horizon: usize,
    pub kkt: SparseSym,
    /// `+1` on the `T` states and `T-1` inputs, `-1` on the constraints.
    pub signs: Vec<f64>,
}

impl LqrKkt {
    /// Primal variables: `x_1..x_T` then `u_1..u_{T-1}`.
    pub fn nvars(&self) -> usize {
        NX * self.horizon + NU * (self.horizon - 1)
    }

    /// Dynamics rows then the initial-state rows.
    pub fn ncons(&self) -> usize {
        NX * self.horizon
    }
}

/// `A` and `B` have standard normal entries.
pub fn lqr_kkt(horizon: usize, seed: u64) -> LqrKkt {
    assert!(horizon >= 2, "horizon must be at least 2");
    let mut rng = Sampler::new(seed, STREAM);
    let a: Vec<f64> = (0..NX * NX).map(|_| rng.normal(0.0, 1.0)).collect();
    let b: Vec<f64> = (0..NX * NU).map(|_| rng.normal(0.0, 1.0)).collect();
    let nv = NX * horizon + NU * (horizon - 1);
    let x = |k: usize| NX * k;
    let u = |k: usize| NX * horizon + NU * k;

    let mut t = Vec::new();
    t.extend((0..nv).map(|j| (j, j, 1.0)));
    // Constraint row r sits at column nv + r; H^T lands above the diagonal.
    for k in 0..horizon - 1 {
        for i in 0..NX {
            let col = nv + NX * k + i;
            for j in 0..NX {
                t.push((x(k) + j, col, a[NX * i + j]));
            }
            t.push((x(k + 1) + i, col, -1.0));
            for j in 0..NU {
                t.push((u(k) + j, col, b[NU * i + j]));
            }
        }
    }
    for i in 0..NX {
        t.push((x(0) + i, nv + NX * (horizon - 1) + i, 1.0));
    }
    let dim = nv + NX * horizon;
    t.extend((nv..dim).map(|j| (j, j, -EPS)));
    let kkt = SparseSym::from_triplets(dim, &t).expect("block entries are distinct");
    let signs = (0..dim).map(|j| if j < nv { 1.0 } else { -1.0 }).collect();
    LqrKkt { horizon, kkt, signs }
}
