//! Sparse symmetric kernels for quasidefinite KKT systems.

mod amd;
mod ldl;
mod permute;

pub use amd::amd_order;
pub use ldl::{
    backsolve, ldl_solve, numeric_factor, regularize, solve_refined, symbolic_factor, FactorError, LdlFactors,
    SymbolicFactor,
};
pub use permute::permute_symmetric;

/// A symmetric permutation. `perm[new] = old`, `iperm[old] = new`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    pub perm: Vec<usize>,
    pub iperm: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { perm: (0..n).collect(), iperm: (0..n).collect() }
    }

    /// Builds from a new-to-old array. Panics unless `perm` is a bijection.
    pub fn from_perm(perm: Vec<usize>) -> Self {
        let n = perm.len();
        let mut iperm = vec![usize::MAX; n];
        for (new, &old) in perm.iter().enumerate() {
            assert!(old < n && iperm[old] == usize::MAX, "not a permutation");
            iperm[old] = new;
        }
        Permutation { perm, iperm }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn inverse(&self) -> Permutation {
        Permutation { perm: self.iperm.clone(), iperm: self.perm.clone() }
    }

    /// `out[new] = v[perm[new]]`
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.perm.iter().map(|&o| v[o]).collect()
    }

    /// `out[perm[new]] = v[new]`
    pub fn apply_inv(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = v[new];
        }
        out
    }
}

/// Number of strictly-lower nonzeros of `L` when factoring `pattern` under
/// `perm`.
pub fn factor_nnz(pattern: &crate::problem::SparseSym, perm: &Permutation) -> usize {
    symbolic_factor(pattern, perm.clone()).nnz_l()
}
