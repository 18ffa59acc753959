//! A chain of masses and springs between two walls, driven to rest under
//! box constraints on states and forces.

use forge_core::{ConeSpec, ProblemData, Solution, SparseSym};
use nalgebra::DMatrix;

use super::{check, Class, Tri};
use crate::rng::Sampler;

pub const MASSES: usize = 4;
pub const DT: f64 = 0.25;
pub const X_MAX: f64 = 2.0;
pub const U_MAX: f64 = 5.0;
const NX: usize = 2 * MASSES;
const NU: usize = MASSES;

/// Columns of the states `x_0..x_T` and forces `u_0..u_{T-1}`.
#[derive(Debug, Clone, Copy)]
pub struct Layout {
    pub steps: usize,
}

impl Layout {
    pub fn x(&self, k: usize) -> usize {
        NX * k
    }
    pub fn u(&self, k: usize) -> usize {
        NX * (self.steps + 1) + NU * k
    }
    pub fn n(&self) -> usize {
        NX * (self.steps + 1) + NU * self.steps
    }
}

/// Continuous-time `(A_c, B_c)`: positions then velocities, with the
/// tridiagonal spring Laplacian coupling neighbours.
pub fn continuous() -> (DMatrix<f64>, DMatrix<f64>) {
    let mut ac = DMatrix::zeros(NX, NX);
    for i in 0..MASSES {
        ac[(i, MASSES + i)] = 1.0;
        ac[(MASSES + i, i)] = -2.0;
        if i + 1 < MASSES {
            ac[(MASSES + i, i + 1)] = 1.0;
            ac[(MASSES + i + 1, i)] = 1.0;
        }
    }
    let mut bc = DMatrix::zeros(NX, NU);
    for i in 0..MASSES {
        bc[(MASSES + i, i)] = 1.0;
    }
    (ac, bc)
}

/// Zero-order-hold discretization: `A = exp(A_c dt)`,
/// `B = A_c^{-1} (A - I) B_c`. The exponential is nalgebra's
/// scaling-and-squaring Pade approximant.
pub fn discretize(dt: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let (ac, bc) = continuous();
    let a = (&ac * dt).exp();
    let lu = ac.lu();
    let b = lu.solve(&((&a - DMatrix::identity(NX, NX)) * bc)).expect("spring Laplacian is nonsingular");
    (a, b)
}

/// `minimize 1/2 sum x'Qx + u'Ru` over dynamics from `x_init` and boxes,
/// with diagonal weights `q` and `r`.
pub fn from_parts(steps: usize, x_init: &[f64], q: &[f64], r: &[f64]) -> ProblemData {
    assert!(steps >= 1, "need at least one step");
    let lay = Layout { steps };
    let n = lay.n();
    let (a, b) = discretize(DT);

    let mut p = Vec::with_capacity(n);
    for k in 0..=steps {
        p.extend((0..NX).map(|i| (lay.x(k) + i, lay.x(k) + i, q[i])));
    }
    for k in 0..steps {
        p.extend((0..NU).map(|i| (lay.u(k) + i, lay.u(k) + i, r[i])));
    }

    let neq = NX * (steps + 1);
    let mut am = Tri::new(neq, n);
    let mut rhs = vec![0.0; neq];
    for k in 0..steps {
        for i in 0..NX {
            let row = NX * k + i;
            am.push(row, lay.x(k + 1) + i, 1.0);
            for j in 0..NX {
                am.push(row, lay.x(k) + j, -a[(i, j)]);
            }
            for j in 0..NU {
                am.push(row, lay.u(k) + j, -b[(i, j)]);
            }
        }
    }
    for i in 0..NX {
        am.push(NX * steps + i, lay.x(0) + i, 1.0);
        rhs[NX * steps + i] = x_init[i];
    }

    // `v <= bound` for every variable, then `-v <= bound`.
    let mut g = Tri::new(2 * n, n);
    let mut h = vec![0.0; 2 * n];
    for j in 0..n {
        let bound = if j < lay.u(0) { X_MAX } else { U_MAX };
        g.push(j, j, 1.0);
        g.push(n + j, j, -1.0);
        h[j] = bound;
        h[n + j] = bound;
    }

    ProblemData {
        n,
        p: neq,
        P: SparseSym::from_triplets(n, &p).expect("diagonal entries are distinct"),
        c: vec![0.0; n],
        A: am.finish(),
        b: rhs,
        G: g.finish(),
        h,
        cones: ConeSpec::orthant(2 * n),
    }
}

/// Whether velocity damping `u = clamp(-k v)` with one of a few gains keeps
/// every state inside its box for `steps` steps from `x0`. Success is a
/// feasibility certificate; failure proves nothing.
pub fn damping_certifies(steps: usize, x0: &[f64]) -> bool {
    let (a, b) = discretize(DT);
    [2.0, 4.0, 8.0].iter().any(|&gain| {
        let mut x = x0.to_vec();
        for _ in 0..steps {
            let u: Vec<f64> = (0..NU).map(|i| (-gain * x[MASSES + i]).clamp(-U_MAX, U_MAX)).collect();
            x = (0..NX)
                .map(|i| {
                    (0..NX).map(|j| a[(i, j)] * x[j]).sum::<f64>() + (0..NU).map(|j| b[(i, j)] * u[j]).sum::<f64>()
                })
                .collect();
            if x.iter().any(|v| v.abs() > X_MAX) {
                return false;
            }
        }
        true
    })
}

/// Weights `U(0, 10)`; initial state standard normal clipped to 90% of the
/// state bound. Clipping alone does not make the problem feasible (a state
/// at the clip value moving outward can leave the box within one step
/// under any admissible force), so the initial state is redrawn until
/// [`damping_certifies`] it.
pub fn gen_oscillating_masses(steps: usize, seed: u64) -> ProblemData {
    let mut rng = Sampler::new(seed, Class::Oscmass.stream());
    let q: Vec<f64> = (0..NX).map(|_| rng.uniform(0.0, 10.0)).collect();
    let r: Vec<f64> = (0..NU).map(|_| rng.uniform(0.0, 10.0)).collect();
    let lim = 0.9 * X_MAX;
    loop {
        let x_init: Vec<f64> = (0..NX).map(|_| rng.normal(0.0, 1.0).clamp(-lim, lim)).collect();
        if damping_certifies(steps, &x_init) {
            return from_parts(steps, &x_init, &q, &r);
        }
    }
}

/// States and forces stay within their boxes.
pub(crate) fn audit(steps: usize, prob: &ProblemData, sol: &Solution, tol: f64) -> Result<(), String> {
    let lay = Layout { steps };
    for (j, &v) in sol.x.iter().enumerate() {
        let bound = if j < lay.u(0) { X_MAX } else { U_MAX };
        check(v.abs() <= bound + tol, || format!("variable {j} = {v} outside +-{bound}"))?;
    }
    let mut ax = vec![0.0; prob.p];
    prob.A.mul(&sol.x, &mut ax);
    let worst = ax.iter().zip(&prob.b).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    check(worst <= tol, || format!("dynamics violated by {worst}"))
}
