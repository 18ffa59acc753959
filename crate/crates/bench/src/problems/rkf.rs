//! Robust Kalman filtering for a 2-D vehicle with linear drag.
//!
//! The Huber penalty of each measurement residual `v` is written as
//! `min a^2 + 2 rho b` subject to `||v|| <= a + b`, `b >= 0`. Minimizing
//! over `a` gives `||v||^2` when `||v|| <= rho` and `2 rho ||v|| - rho^2`
//! otherwise.

use forge_core::{ConeSpec, ProblemData, Solution, SparseSym};

use super::{check, close, norm2, Class, Tri};
use crate::rng::Sampler;

pub const GAMMA: f64 = 0.05;
pub const RHO: f64 = 2.0;
pub const TAU: f64 = 2.0;
pub const HORIZON: f64 = 50.0;
/// Probability that a measurement noise entry is an outlier.
pub const OUTLIER_PROB: f64 = 0.2;
pub const OUTLIER_STD: f64 = 20.0;

/// Columns of the states `x_0..x_N`, forces `w_k`, residuals `v_k` and the
/// Huber split `a_k`, `b_k`, for `k < N`.
#[derive(Debug, Clone, Copy)]
pub struct Layout {
    pub steps: usize,
}

impl Layout {
    pub fn x(&self, k: usize) -> usize {
        4 * k
    }
    pub fn w(&self, k: usize) -> usize {
        4 * (self.steps + 1) + 2 * k
    }
    pub fn v(&self, k: usize) -> usize {
        4 * (self.steps + 1) + 2 * self.steps + 2 * k
    }
    pub fn a(&self, k: usize) -> usize {
        4 * (self.steps + 1) + 4 * self.steps + k
    }
    pub fn b(&self, k: usize) -> usize {
        4 * (self.steps + 1) + 5 * self.steps + k
    }
    pub fn n(&self) -> usize {
        4 * (self.steps + 1) + 6 * self.steps
    }
}

/// Drag-damped double integrator `(A, B)` with step `dt`.
pub fn dynamics(dt: f64) -> ([[f64; 4]; 4], [[f64; 2]; 4]) {
    let v = (1.0 - 0.5 * GAMMA * dt) * dt;
    let d = 1.0 - GAMMA * dt;
    let a = [[1.0, 0.0, v, 0.0], [0.0, 1.0, 0.0, v], [0.0, 0.0, d, 0.0], [0.0, 0.0, 0.0, d]];
    let h = 0.5 * dt * dt;
    let b = [[h, 0.0], [0.0, h], [dt, 0.0], [0.0, dt]];
    (a, b)
}

pub fn step(steps: usize) -> f64 {
    HORIZON / (steps - 1) as f64
}

/// `phi_rho(z)`
pub fn huber(z: &[f64]) -> f64 {
    let r = norm2(z);
    if r <= RHO {
        r * r
    } else {
        2.0 * RHO * r - RHO * RHO
    }
}

/// Forward-simulates `x_{k+1} = A x_k + B w_k` and returns the position
/// measurements `y_k = C x_k + v_k` for `k < steps`.
pub fn simulate(steps: usize, x0: [f64; 4], w: &[[f64; 2]], v: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let (a, b) = dynamics(step(steps));
    let mut x = x0;
    let mut y = Vec::with_capacity(steps);
    for k in 0..steps {
        y.push([x[0] + v[k][0], x[1] + v[k][1]]);
        let mut next = [0.0; 4];
        for (i, nx) in next.iter_mut().enumerate() {
            *nx = (0..4).map(|j| a[i][j] * x[j]).sum::<f64>() + (0..2).map(|j| b[i][j] * w[k][j]).sum::<f64>();
        }
        x = next;
    }
    y
}

/// The estimation problem for measurements `y`.
pub fn from_measurements(y: &[[f64; 2]]) -> ProblemData {
    let steps = y.len();
    assert!(steps >= 2, "need at least two timesteps");
    let lay = Layout { steps };
    let n = lay.n();
    let (a, b) = dynamics(step(steps));

    let mut p = Vec::new();
    let mut c = vec![0.0; n];
    for k in 0..steps {
        for i in 0..2 {
            p.push((lay.w(k) + i, lay.w(k) + i, 2.0));
        }
        p.push((lay.a(k), lay.a(k), 2.0 * TAU));
        c[lay.b(k)] = 2.0 * TAU * RHO;
    }

    // Dynamics rows 4k..4k+4, then measurement rows 4N + 2k.
    let neq = 6 * steps;
    let mut am = Tri::new(neq, n);
    let mut rhs = vec![0.0; neq];
    for k in 0..steps {
        for i in 0..4 {
            let r = 4 * k + i;
            am.push(r, lay.x(k + 1) + i, 1.0);
            for j in 0..4 {
                if a[i][j] != 0.0 {
                    am.push(r, lay.x(k) + j, -a[i][j]);
                }
            }
            for j in 0..2 {
                if b[i][j] != 0.0 {
                    am.push(r, lay.w(k) + j, -b[i][j]);
                }
            }
        }
        for i in 0..2 {
            let r = 4 * steps + 2 * k + i;
            am.push(r, lay.x(k) + i, 1.0);
            am.push(r, lay.v(k) + i, 1.0);
            rhs[r] = y[k][i];
        }
    }

    // Orthant rows `b_k >= 0`, then one (a_k + b_k, v_k) cone per step.
    let m = steps + 3 * steps;
    let mut g = Tri::new(m, n);
    for k in 0..steps {
        g.push(k, lay.b(k), -1.0);
        let r = steps + 3 * k;
        g.push(r, lay.a(k), -1.0);
        g.push(r, lay.b(k), -1.0);
        g.push(r + 1, lay.v(k), -1.0);
        g.push(r + 2, lay.v(k) + 1, -1.0);
    }

    ProblemData {
        n,
        p: neq,
        P: SparseSym::from_triplets(n, &p).expect("diagonal entries are distinct"),
        c,
        A: am.finish(),
        b: rhs,
        G: g.finish(),
        h: vec![0.0; m],
        cones: ConeSpec::new(steps, vec![3; steps]),
    }
}

/// `steps` timesteps of measurements simulated from rest with standard
/// normal forces and noise, where each noise entry is an outlier with
/// probability [`OUTLIER_PROB`].
pub fn gen_robust_kalman(steps: usize, seed: u64) -> ProblemData {
    let mut rng = Sampler::new(seed, Class::Rkf.stream());
    let w: Vec<[f64; 2]> = (0..steps).map(|_| [rng.normal(0.0, 1.0), rng.normal(0.0, 1.0)]).collect();
    let mut v = Vec::with_capacity(steps);
    for _ in 0..steps {
        let mut e = [0.0; 2];
        for x in &mut e {
            let std = if rng.bernoulli(OUTLIER_PROB) { OUTLIER_STD } else { 1.0 };
            *x = rng.normal(0.0, std);
        }
        v.push(e);
    }
    from_measurements(&simulate(steps, [0.0; 4], &w, &v))
}

/// Measurements of an undisturbed trajectory from `x0`; the optimal value
/// is zero with `w = 0`.
pub fn gen_robust_kalman_noiseless(steps: usize, x0: [f64; 4]) -> ProblemData {
    let zero = vec![[0.0; 2]; steps];
    from_measurements(&simulate(steps, x0, &zero, &zero))
}

/// The conic objective equals `sum ||w_k||^2 + tau phi_rho(v_k)` evaluated
/// directly on the solution.
pub(crate) fn audit(steps: usize, prob: &ProblemData, sol: &Solution, tol: f64) -> Result<(), String> {
    let lay = Layout { steps };
    let x = &sol.x;
    let direct: f64 = (0..steps)
        .map(|k| {
            let w = &x[lay.w(k)..lay.w(k) + 2];
            w[0] * w[0] + w[1] * w[1] + TAU * huber(&x[lay.v(k)..lay.v(k) + 2])
        })
        .sum();
    let conic = prob.objective(x);
    check(close(direct, conic, tol), || format!("Huber objective {direct} differs from conic objective {conic}"))
}
