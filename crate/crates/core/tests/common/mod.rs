#![allow(dead_code)]

use forge_core::{ConeSpec, ProblemData, SparseMat, SparseSym};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// n=4, p=2, one orthant row and one 3-dimensional second-order cone.
pub fn toy_problem() -> ProblemData {
    let mut g = vec![0.0; 16];
    for i in 0..4 {
        g[i * 4 + i] = -1.0;
    }
    ProblemData {
        n: 4,
        p: 2,
        P: SparseSym::diag(&[2.0, 2.0, 2.0, 0.0]),
        c: vec![0.0, 0.0, 0.0, 1.0],
        A: SparseMat::from_dense(2, 4, &[1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0]),
        b: vec![1.0, 1.0],
        G: SparseMat::from_dense(4, 4, &g),
        h: vec![0.0; 4],
        cones: ConeSpec::new(1, vec![3]),
    }
}

/// Minimizer value of `f` on `[a, b]` by golden-section search.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    while (b - a).abs() > tol {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    f((a + b) / 2.0)
}

/// Optimal value of the toy problem, reduced to one parameter `t = x1`.
pub fn toy_optimum() -> f64 {
    golden_min(|t| 2.0 * (1.0 - t) * (1.0 - t) + t * t - (2.0 * t - 1.0).max(0.0).sqrt(), 0.5, 1.0, 1e-12)
}

/// Solves a dense row-major system by Gaussian elimination with partial
/// pivoting.
pub fn dense_solve(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| m[i * n + k].abs().total_cmp(&m[j * n + k].abs())).unwrap();
        if piv != k {
            for j in 0..n {
                m.swap(k * n + j, piv * n + j);
            }
            x.swap(k, piv);
        }
        for i in k + 1..n {
            let f = m[i * n + k] / m[k * n + k];
            for j in k..n {
                m[i * n + j] -= f * m[k * n + j];
            }
            x[i] -= f * x[k];
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in k + 1..n {
            s -= m[k * n + j] * x[j];
        }
        x[k] = s / m[k * n + k];
    }
    x
}

pub fn dense_matvec(n: usize, a: &[f64], x: &[f64]) -> Vec<f64> {
    (0..n).map(|i| (0..n).map(|j| a[i * n + j] * x[j]).sum()).collect()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Random quasidefinite matrix: positive definite leading `npos` block,
/// negative definite trailing block, random coupling. Returns the upper
/// triangle and the sign vector.
pub fn random_quasidefinite(rng: &mut ChaCha8Rng, npos: usize, nneg: usize, density: f64) -> (SparseSym, Vec<f64>) {
    let n = npos + nneg;
    let mut d = vec![0.0f64; n * n];
    for j in 0..n {
        for i in 0..j {
            if rng.gen::<f64>() < density {
                let v = rng.gen_range(-1.0..1.0);
                let same = (i < npos) == (j < npos);
                let v = if same { 0.3 * v } else { v };
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
    }
    for i in 0..n {
        let row: f64 = (0..n).filter(|&j| j != i && ((i < npos) == (j < npos))).map(|j| d[i * n + j].abs()).sum();
        let mag = row + rng.gen_range(0.1..2.0);
        d[i * n + i] = if i < npos { mag } else { -mag };
    }
    let signs = (0..n).map(|i| if i < npos { 1.0 } else { -1.0 }).collect();
    (SparseSym::from_dense_upper(n, &d), signs)
}
