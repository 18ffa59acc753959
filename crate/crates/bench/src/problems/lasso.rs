//! Group lasso with groups of ten, in epigraph form with the residual
//! `y = Ax - b` kept as a variable so `P` stays diagonal.

use forge_core::{ConeSpec, ProblemData, Solution, SparseMat, SparseSym};

use super::{check, norm2, Class, Tri};
use crate::rng::Sampler;

pub const GROUP: usize = 10;
pub const ROWS_PER_GROUP: usize = 250;
pub const DENSITY: f64 = 0.1;

/// Columns of the coefficients `x`, group bounds `t` and residuals `y`.
#[derive(Debug, Clone, Copy)]
pub struct Layout {
    pub groups: usize,
}

impl Layout {
    pub fn x(&self, g: usize) -> usize {
        GROUP * g
    }
    pub fn t(&self, g: usize) -> usize {
        GROUP * self.groups + g
    }
    pub fn y(&self, i: usize) -> usize {
        (GROUP + 1) * self.groups + i
    }
    pub fn rows(&self) -> usize {
        ROWS_PER_GROUP * self.groups
    }
    pub fn n(&self) -> usize {
        (GROUP + 1) * self.groups + self.rows()
    }
}

/// `minimize ||y||^2 + lambda sum t_g` subject to `Ax - y = b` and
/// `||x_g|| <= t_g`.
pub fn from_data(groups: usize, a: &SparseMat, b: &[f64], lambda: f64) -> ProblemData {
    let lay = Layout { groups };
    let (rows, n) = (lay.rows(), lay.n());
    assert_eq!((a.rows, a.cols), (rows, GROUP * groups));
    let mut am = Tri::new(rows, n);
    for j in 0..a.cols {
        for k in a.colptr[j]..a.colptr[j + 1] {
            am.push(a.rowidx[k], j, a.vals[k]);
        }
    }
    for i in 0..rows {
        am.push(i, lay.y(i), -1.0);
    }
    let m = (GROUP + 1) * groups;
    let mut g = Tri::new(m, n);
    for grp in 0..groups {
        let r = (GROUP + 1) * grp;
        g.push(r, lay.t(grp), -1.0);
        for i in 0..GROUP {
            g.push(r + 1 + i, lay.x(grp) + i, -1.0);
        }
    }
    let mut c = vec![0.0; n];
    for grp in 0..groups {
        c[lay.t(grp)] = lambda;
    }
    ProblemData {
        n,
        p: rows,
        P: SparseSym::from_triplets(n, &(0..rows).map(|i| (lay.y(i), lay.y(i), 2.0)).collect::<Vec<_>>())
            .expect("diagonal entries are distinct"),
        c,
        A: am.finish(),
        b: b.to_vec(),
        G: g.finish(),
        h: vec![0.0; m],
        cones: ConeSpec::new(0, vec![GROUP + 1; groups]),
    }
}

/// Regression weight for data `(A, b)`: `||A^T b||_inf`.
pub fn lambda(a: &SparseMat, b: &[f64]) -> f64 {
    let mut atb = vec![0.0; a.cols];
    a.mul_t(b, &mut atb);
    atb.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `A` has about 10% nonzeros drawn from U(0, 1); `b = A x + e` where half
/// the groups of `x` (rounded down) are zero and the rest standard normal,
/// and `e` has standard deviation `1/n`.
pub fn gen_group_lasso(groups: usize, seed: u64) -> ProblemData {
    assert!(groups >= 1, "need at least one group");
    let mut rng = Sampler::new(seed, Class::Lasso.stream());
    let lay = Layout { groups };
    let (rows, cols) = (lay.rows(), GROUP * groups);
    let mut a = Tri::new(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            if rng.bernoulli(DENSITY) {
                a.push(i, j, rng.uniform(0.0, 1.0));
            }
        }
    }
    let a = a.finish();
    let mut order: Vec<usize> = (0..groups).collect();
    rng.shuffle(&mut order);
    let mut xhat = vec![0.0; cols];
    for &grp in &order[groups / 2..] {
        for v in &mut xhat[GROUP * grp..GROUP * (grp + 1)] {
            *v = rng.normal(0.0, 1.0);
        }
    }
    let mut b = vec![0.0; rows];
    a.mul(&xhat, &mut b);
    for v in &mut b {
        *v += rng.normal(0.0, 1.0 / cols as f64);
    }
    from_data(groups, &a, &b, lambda(&a, &b))
}

/// Each group bound is tight: `t_g = ||x_g||`.
pub(crate) fn audit(groups: usize, sol: &Solution, tol: f64) -> Result<(), String> {
    let lay = Layout { groups };
    for g in 0..groups {
        let t = sol.x[lay.t(g)];
        let norm = norm2(&sol.x[lay.x(g)..lay.x(g) + GROUP]);
        check((t - norm).abs() <= tol * t.abs().max(1.0), || format!("group {g}: t = {t}, ||x_g|| = {norm}"))?;
    }
    Ok(())
}
