//! Up-looking sparse `LDL^T` with dynamic regularization.
//!
//! Column `k` of the factorization solves a triangular system with the
//! previously computed columns along the elimination-tree reach of column
//! `k` of the permuted upper triangle. The symbolic phase fixes the pattern
//! of `L` once; numeric refactorization reuses it.

use thiserror::Error;

use super::{permute_symmetric, Permutation};
use crate::problem::SparseSym;
use crate::runtime::solver::{self, RefineBufs, RefineStats};

pub(crate) const NONE: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("non-finite pivot at column {0}")]
    NonFinite(usize),
    #[error("value array has length {got}, pattern expects {expected}")]
    Length { got: usize, expected: usize },
}

/// Ordering, elimination tree and `L` pattern for one sparsity pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicFactor {
    pub n: usize,
    pub perm: Permutation,
    /// Upper triangle of the permuted matrix (values are the permuted input
    /// values at analysis time).
    pub kperm: SparseSym,
    /// Position in `kperm` of each entry of the unpermuted input.
    pub kmap: Vec<usize>,
    /// Parent of each column in the elimination tree, or `usize::MAX` for
    /// roots.
    pub etree: Vec<usize>,
    /// Strictly-lower nonzeros per column of `L`.
    pub lnz: Vec<usize>,
    pub lp: Vec<usize>,
    /// Row indices of `L`, sorted within each column.
    pub li: Vec<usize>,
}

impl SymbolicFactor {
    pub fn nnz_l(&self) -> usize {
        self.li.len()
    }
}

/// Elimination tree and column counts of `L` for an upper-triangular
/// pattern.
pub(crate) fn etree(colptr: &[usize], rowidx: &[usize], n: usize) -> (Vec<usize>, Vec<usize>) {
    let mut work = vec![NONE; n];
    let mut parent = vec![NONE; n];
    let mut lnz = vec![0; n];
    for j in 0..n {
        work[j] = j;
        for &r in &rowidx[colptr[j]..colptr[j + 1]] {
            let mut i = r;
            while work[i] != j {
                if parent[i] == NONE {
                    parent[i] = j;
                }
                lnz[i] += 1;
                work[i] = j;
                i = parent[i];
            }
        }
    }
    (parent, lnz)
}

/// Symbolic analysis of `pattern` under `perm`.
pub fn symbolic_factor(pattern: &SparseSym, perm: Permutation) -> SymbolicFactor {
    let n = pattern.n;
    let (kperm, kmap) = permute_symmetric(pattern, &perm);
    let (parent, lnz) = etree(&kperm.colptr, &kperm.rowidx, n);
    let mut lp = vec![0; n + 1];
    for i in 0..n {
        lp[i + 1] = lp[i] + lnz[i];
    }
    // Same traversal as `etree`: visiting column i while processing column j
    // means L[j, i] is nonzero, and j increases, so rows come out sorted.
    let mut li = vec![0; lp[n]];
    let mut next = lp.clone();
    let mut work = vec![NONE; n];
    for j in 0..n {
        work[j] = j;
        for &r in &kperm.rowidx[kperm.colptr[j]..kperm.colptr[j + 1]] {
            let mut i = r;
            while work[i] != j {
                li[next[i]] = j;
                next[i] += 1;
                work[i] = j;
                i = parent[i];
            }
        }
    }
    SymbolicFactor { n, perm, kperm, kmap, etree: parent, lnz, lp, li }
}

/// Numeric factors `L`, `D` on a symbolic pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct LdlFactors {
    pub lx: Vec<f64>,
    pub d: Vec<f64>,
    pub dinv: Vec<f64>,
    /// Expected pivot signs in permuted order.
    pub signs: Vec<f64>,
    /// Pivots that took the wrong-sign branch of the regularization.
    pub nreg: usize,
    /// `D_k` after regularization minus `D_k` before, per pivot.
    pub perturb: Vec<f64>,
    y: Vec<f64>,
    marker: Vec<bool>,
    yidx: Vec<usize>,
    ebuf: Vec<usize>,
    next: Vec<usize>,
}

impl LdlFactors {
    pub fn new(sym: &SymbolicFactor, signs: Vec<f64>) -> Self {
        let n = sym.n;
        assert_eq!(signs.len(), n);
        LdlFactors {
            lx: vec![0.0; sym.nnz_l()],
            d: vec![0.0; n],
            dinv: vec![0.0; n],
            signs,
            nreg: 0,
            perturb: vec![0.0; n],
            y: vec![0.0; n],
            marker: vec![false; n],
            yidx: vec![0; n],
            ebuf: vec![0; n],
            next: vec![0; n],
        }
    }

    /// Refactors with values `kx` on the permuted pattern `sym.kperm`.
    /// Returns the number of wrong-sign pivots.
    pub fn refactor(&mut self, sym: &SymbolicFactor, kx: &[f64], eps_d: f64) -> Result<usize, FactorError> {
        let n = sym.n;
        if kx.len() != sym.kperm.nnz() {
            return Err(FactorError::Length { got: kx.len(), expected: sym.kperm.nnz() });
        }
        let (ap, ai) = (&sym.kperm.colptr, &sym.kperm.rowidx);
        let (lp, li, etree) = (&sym.lp, &sym.li, &sym.etree);
        let lx = &mut self.lx;
        let d = &mut self.d;
        let dinv = &mut self.dinv;
        let y = &mut self.y;
        let marker = &mut self.marker;
        let yidx = &mut self.yidx;
        let ebuf = &mut self.ebuf;
        let next = &mut self.next;
        next[..n].copy_from_slice(&lp[..n]);
        let mut nreg = 0;
        for k in 0..n {
            d[k] = 0.0;
            let mut ny = 0;
            for t in ap[k]..ap[k + 1] {
                let b = ai[t];
                if b == k {
                    d[k] = kx[t];
                    continue;
                }
                y[b] = kx[t];
                if !marker[b] {
                    marker[b] = true;
                    ebuf[0] = b;
                    let mut ne = 1;
                    let mut i = etree[b];
                    while i != NONE && i < k {
                        if marker[i] {
                            break;
                        }
                        marker[i] = true;
                        ebuf[ne] = i;
                        ne += 1;
                        i = etree[i];
                    }
                    while ne > 0 {
                        ne -= 1;
                        yidx[ny] = ebuf[ne];
                        ny += 1;
                    }
                }
            }
            for r in (0..ny).rev() {
                let c = yidx[r];
                let yc = y[c];
                let end = next[c];
                for j in lp[c]..end {
                    y[li[j]] -= lx[j] * yc;
                }
                lx[end] = yc * dinv[c];
                d[k] -= yc * lx[end];
                next[c] += 1;
                y[c] = 0.0;
                marker[c] = false;
            }
            let before = d[k];
            d[k] = regularize(d[k], self.signs[k], eps_d, &mut nreg);
            self.perturb[k] = d[k] - before;
            if !d[k].is_finite() {
                return Err(FactorError::NonFinite(k));
            }
            dinv[k] = 1.0 / d[k];
        }
        self.nreg = nreg;
        Ok(nreg)
    }

    /// Solves `L D L^T x = b` in place, in permuted order.
    pub fn solve_in_place(&self, sym: &SymbolicFactor, x: &mut [f64]) {
        ldl_solve(&sym.lp, &sym.li, &self.lx, &self.dinv, x);
    }
}

/// Dynamic regularization of one pivot: a pivot of the wrong sign (or zero)
/// is replaced by `sign * eps_d` and counted; otherwise `sign * eps_d` is
/// added.
#[inline]
pub fn regularize(dk: f64, sign: f64, eps_d: f64, nreg: &mut usize) -> f64 {
    if sign > 0.0 {
        if dk <= 0.0 {
            *nreg += 1;
            eps_d
        } else {
            dk + eps_d
        }
    } else if dk >= 0.0 {
        *nreg += 1;
        -eps_d
    } else {
        dk - eps_d
    }
}

/// `L D L^T` solve in place.
pub fn ldl_solve(lp: &[usize], li: &[usize], lx: &[f64], dinv: &[f64], x: &mut [f64]) {
    let n = dinv.len();
    for i in 0..n {
        let xi = x[i];
        for j in lp[i]..lp[i + 1] {
            x[li[j]] -= lx[j] * xi;
        }
    }
    for i in 0..n {
        x[i] *= dinv[i];
    }
    for i in (0..n).rev() {
        let mut xi = x[i];
        for j in lp[i]..lp[i + 1] {
            xi -= lx[j] * x[li[j]];
        }
        x[i] = xi;
    }
}

/// Factors `P K P^T` given `kx`, values on `sym.kperm`, and expected signs
/// in permuted order.
pub fn numeric_factor(kx: &[f64], sym: &SymbolicFactor, signs: &[f64], eps_d: f64) -> Result<LdlFactors, FactorError> {
    let mut f = LdlFactors::new(sym, signs.to_vec());
    f.refactor(sym, kx, eps_d)?;
    Ok(f)
}

/// Solves `K x = rhs` in the original ordering.
pub fn backsolve(sym: &SymbolicFactor, f: &LdlFactors, rhs: &[f64]) -> Vec<f64> {
    let mut x = sym.perm.apply(rhs);
    f.solve_in_place(sym, &mut x);
    sym.perm.apply_inv(&x)
}

/// Solves `K x = rhs` in the original ordering, where the factors hold a
/// perturbation of `K` and `k_mul` applies `K` itself. Residuals are measured
/// in the infinity norm.
pub fn solve_refined<F: Fn(&[f64], &mut [f64])>(
    sym: &SymbolicFactor,
    f: &LdlFactors,
    k_mul: F,
    rhs: &[f64],
    max_passes: usize,
    tol: f64,
) -> (Vec<f64>, RefineStats) {
    let n = sym.n;
    let perm = &sym.perm;
    let b = perm.apply(rhs);
    let mut x = vec![0.0; n];
    let (mut r, mut dx, mut xc, mut rc) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let kmul = |xp: &[f64], yp: &mut [f64]| {
        let mut out = vec![0.0; n];
        k_mul(&perm.apply_inv(xp), &mut out);
        for i in 0..n {
            yp[i] = out[perm.perm[i]];
        }
    };
    let stats = solver::solve_refined(
        kmul,
        |v: &mut [f64]| f.solve_in_place(sym, v),
        &b,
        &mut x,
        RefineBufs { r: &mut r, dx: &mut dx, xc: &mut xc, rc: &mut rc },
        max_passes,
        tol,
    );
    (perm.apply_inv(&x), stats)
}
