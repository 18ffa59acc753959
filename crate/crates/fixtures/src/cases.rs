//! Problems and seeds shared by the build script and the tests.

use forge_core::{ConeSpec, ProblemData, SparseMat, SparseSym};

/// Seed of the one emitted instance per benchmark class.
pub const CLASS_SEED: u64 = 0;
/// Seed of the LQR KKT matrices.
pub const LQR_SEED: u64 = 0;
/// Horizons with an emitted unrolled factorization.
pub const LQR_HORIZONS: [usize; 3] = [5, 15, 50];

/// n=4, p=2, one orthant row and one 3-dimensional second-order cone:
///
/// ```text
/// minimize    x1^2 + x2^2 + x3^2 + x4
/// subject to  x1 + x2 = 1,  x2 + x3 = 1,  x1 >= 0,  ||(x3, x4)|| <= x2
/// ```
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
