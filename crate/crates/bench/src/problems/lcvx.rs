//! Powered-descent guidance with the lower thrust bound relaxed to a convex
//! constraint on the thrust magnitude slack `sigma`.
//!
//! With `d = z - z0_k`, the lower bound `mu1 (1 - d + d^2/2) <= sigma` is
//! `d^2 <= 2r` for `r = sigma/mu1 - 1 + d`, which is the cone
//! `||(2r - 1, 2d)|| <= 2r + 1`.

use forge_core::{ConeSpec, ProblemData, Solution, SparseSym};

use super::{check, norm2, Class, Tri};
use crate::rng::Sampler;

pub const G0: f64 = 9.807;
pub const RHO1: f64 = 100.0;
pub const RHO2: f64 = 500.0;
pub const M_DRY: f64 = 25.0;
pub const M_WET: f64 = 35.0;
pub const THETA_MAX: f64 = std::f64::consts::FRAC_PI_4;
pub const ALPHA: f64 = 0.001;
pub const T_FINAL: f64 = 20.0;

/// Columns of the states `x_0..x_T`, log-masses `z_0..z_T`, and for
/// `k < T` the thrusts `u_k` and slacks `sigma_k`.
#[derive(Debug, Clone, Copy)]
pub struct Layout {
    pub steps: usize,
}

impl Layout {
    pub fn x(&self, k: usize) -> usize {
        6 * k
    }
    pub fn z(&self, k: usize) -> usize {
        6 * (self.steps + 1) + k
    }
    pub fn u(&self, k: usize) -> usize {
        7 * (self.steps + 1) + 3 * k
    }
    pub fn sigma(&self, k: usize) -> usize {
        7 * (self.steps + 1) + 3 * self.steps + k
    }
    pub fn n(&self) -> usize {
        7 * (self.steps + 1) + 4 * self.steps
    }
}

pub fn step(steps: usize) -> f64 {
    T_FINAL / (steps - 1) as f64
}

/// `log(m_wet - alpha * rho * k * dt)`: the log-mass after burning at
/// thrust `rho` for `k` steps.
pub fn log_mass(rho: f64, k: usize, dt: f64) -> f64 {
    (M_WET - ALPHA * rho * k as f64 * dt).ln()
}

/// The relaxed guidance problem from initial state `x_init`.
pub fn from_initial_state(steps: usize, x_init: [f64; 6]) -> ProblemData {
    assert!(steps >= 2, "need at least two timesteps");
    let lay = Layout { steps };
    let n = lay.n();
    let dt = step(steps);
    let mut c = vec![0.0; n];
    c[lay.z(steps)] = -1.0;

    // Dynamics 6k.., mass depletion 6T + k, then x_0 and z_0.
    let neq = 7 * steps + 7;
    let mut am = Tri::new(neq, n);
    let mut b = vec![0.0; neq];
    let grav = [0.0, 0.0, -0.5 * G0 * dt * dt, 0.0, 0.0, -G0 * dt];
    for k in 0..steps {
        for i in 0..6 {
            let r = 6 * k + i;
            am.push(r, lay.x(k + 1) + i, 1.0);
            am.push(r, lay.x(k) + i, -1.0);
            if i < 3 {
                am.push(r, lay.x(k) + i + 3, -dt);
                am.push(r, lay.u(k) + i, -0.5 * dt * dt);
            } else {
                am.push(r, lay.u(k) + i - 3, -dt);
            }
            b[r] = grav[i];
        }
        let r = 6 * steps + k;
        am.push(r, lay.z(k + 1), 1.0);
        am.push(r, lay.z(k), -1.0);
        am.push(r, lay.sigma(k), ALPHA * dt);
    }
    for i in 0..6 {
        am.push(7 * steps + i, lay.x(0) + i, 1.0);
        b[7 * steps + i] = x_init[i];
    }
    am.push(7 * steps + 6, lay.z(0), 1.0);
    b[7 * steps + 6] = M_WET.ln();

    // Orthant: four rows per step and the dry-mass row, then per step the
    // lower-thrust cone (3) and the thrust cone (4).
    let l = 4 * steps + 1;
    let m = l + 7 * steps;
    let mut g = Tri::new(m, n);
    let mut h = vec![0.0; m];
    for k in 0..steps {
        let z0 = log_mass(RHO2, k, dt);
        let mu1 = RHO1 * (-z0).exp();
        let mu2 = RHO2 * (-z0).exp();
        let r = 4 * k;
        g.push(r, lay.z(k), -1.0);
        h[r] = -z0;
        g.push(r + 1, lay.z(k), 1.0);
        h[r + 1] = log_mass(RHO1, k, dt);
        g.push(r + 2, lay.sigma(k), 1.0);
        g.push(r + 2, lay.z(k), mu2);
        h[r + 2] = mu2 * (1.0 + z0);
        g.push(r + 3, lay.sigma(k), THETA_MAX.cos());
        g.push(r + 3, lay.u(k) + 2, -1.0);

        let r = l + 7 * k;
        g.push(r, lay.sigma(k), -2.0 / mu1);
        g.push(r, lay.z(k), -2.0);
        h[r] = -2.0 * z0 - 1.0;
        g.push(r + 1, lay.sigma(k), -2.0 / mu1);
        g.push(r + 1, lay.z(k), -2.0);
        h[r + 1] = -2.0 * z0 - 3.0;
        g.push(r + 2, lay.z(k), -2.0);
        h[r + 2] = -2.0 * z0;

        g.push(r + 3, lay.sigma(k), -1.0);
        for i in 0..3 {
            g.push(r + 4 + i, lay.u(k) + i, -1.0);
        }
    }
    g.push(4 * steps, lay.z(steps), -1.0);
    h[4 * steps] = -M_DRY.ln();

    let mut q = Vec::with_capacity(2 * steps);
    for _ in 0..steps {
        q.extend([3, 4]);
    }
    ProblemData {
        n,
        p: neq,
        P: SparseSym::zeros(n),
        c,
        A: am.finish(),
        b,
        G: g.finish(),
        h,
        cones: ConeSpec::new(l, q),
    }
}

pub fn gen_lcvx(steps: usize, seed: u64) -> ProblemData {
    let mut rng = Sampler::new(seed, Class::Lcvx.stream());
    let x_init = [rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0), rng.uniform(200.0, 400.0), 0.0, 0.0, 0.0];
    from_initial_state(steps, x_init)
}

/// Thrust magnitude within `sigma`, `sigma` within both thrust bounds, and
/// the final mass at least the dry mass.
pub(crate) fn audit(steps: usize, sol: &Solution, tol: f64) -> Result<(), String> {
    let lay = Layout { steps };
    let x = &sol.x;
    let dt = step(steps);
    for k in 0..steps {
        let sigma = x[lay.sigma(k)];
        let thrust = norm2(&x[lay.u(k)..lay.u(k) + 3]);
        check(thrust <= sigma + tol, || format!("step {k}: ||u|| = {thrust} exceeds sigma = {sigma}"))?;
        let z0 = log_mass(RHO2, k, dt);
        let d = x[lay.z(k)] - z0;
        let lower = RHO1 * (-z0).exp() * (1.0 - d + 0.5 * d * d);
        let upper = RHO2 * (-z0).exp() * (1.0 - d);
        check(lower <= sigma + tol && sigma <= upper + tol, || {
            format!("step {k}: sigma = {sigma} outside [{lower}, {upper}]")
        })?;
    }
    let zt = x[lay.z(steps)];
    check(zt >= M_DRY.ln() - tol, || format!("final log-mass {zt} below log m_dry"))
}
