//! Problem data for
//!
//! ```text
//! minimize    1/2 x'Px + c'x
//! subject to  Ax = b,  Gx + s = h,  s in K
//! ```
//!
//! where `K` is a nonnegative orthant followed by second-order cones.

use thiserror::Error;

pub use crate::runtime::solver::{Settings, Status};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("dimension mismatch in `{0}`")]
    DimensionMismatch(String),
    #[error("malformed CSC matrix `{matrix}` at column {col}: {reason}")]
    MalformedCsc { matrix: String, col: usize, reason: String },
    #[error("second-order cone {0} has dimension 0")]
    NegativeConeDim(usize),
    #[error("non-finite value in `{0}`")]
    NonFinite(String),
    #[error("negative diagonal entry of P in column {0}")]
    NegativeDiagonal(usize),
}

/// Orthant of dimension `l` followed by second-order cones of dimensions `q`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConeSpec {
    pub l: usize,
    pub q: Vec<usize>,
}

impl ConeSpec {
    pub fn new(l: usize, q: Vec<usize>) -> Self {
        ConeSpec { l, q }
    }

    pub fn orthant(l: usize) -> Self {
        ConeSpec { l, q: Vec::new() }
    }

    /// Total dimension `l + sum(q)`. Saturates instead of overflowing.
    pub fn m(&self) -> usize {
        self.q.iter().fold(self.l, |acc, &qi| acc.saturating_add(qi))
    }

    pub fn nsoc(&self) -> usize {
        self.q.len()
    }

    /// Offsets of each second-order cone block within a length-`m` vector.
    pub fn soc_offsets(&self) -> Vec<usize> {
        let mut off = self.l;
        self.q
            .iter()
            .map(|&qi| {
                let o = off;
                off += qi;
                o
            })
            .collect()
    }

    pub fn validate(&self) -> Result<(), ProblemError> {
        match self.q.iter().position(|&qi| qi == 0) {
            Some(i) => Err(ProblemError::NegativeConeDim(i)),
            None => Ok(()),
        }
    }
}

/// Rectangular matrix in compressed sparse column form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMat {
    pub rows: usize,
    pub cols: usize,
    pub colptr: Vec<usize>,
    pub rowidx: Vec<usize>,
    pub vals: Vec<f64>,
}

impl SparseMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMat { rows, cols, colptr: vec![0; cols + 1], rowidx: Vec::new(), vals: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        SparseMat { rows: n, cols: n, colptr: (0..=n).collect(), rowidx: (0..n).collect(), vals: vec![1.0; n] }
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are
    /// rejected.
    pub fn from_triplets(rows: usize, cols: usize, trip: &[(usize, usize, f64)]) -> Result<Self, ProblemError> {
        let mut t: Vec<(usize, usize, f64)> = trip.to_vec();
        t.sort_by_key(|e| (e.1, e.0));
        let mut colptr = vec![0usize; cols + 1];
        for &(r, c, _) in &t {
            if r >= rows || c >= cols {
                return Err(ProblemError::DimensionMismatch("triplet index".into()));
            }
            colptr[c + 1] += 1;
        }
        for j in 0..cols {
            colptr[j + 1] += colptr[j];
        }
        let m = SparseMat {
            rows,
            cols,
            colptr,
            rowidx: t.iter().map(|e| e.0).collect(),
            vals: t.iter().map(|e| e.2).collect(),
        };
        m.check("triplets")?;
        Ok(m)
    }

    /// Builds a matrix from row-major dense storage, keeping nonzeros only.
    pub fn from_dense(rows: usize, cols: usize, dense: &[f64]) -> Self {
        assert_eq!(dense.len(), rows * cols);
        let mut colptr = Vec::with_capacity(cols + 1);
        let mut rowidx = Vec::new();
        let mut vals = Vec::new();
        colptr.push(0);
        for j in 0..cols {
            for i in 0..rows {
                let v = dense[i * cols + j];
                if v != 0.0 {
                    rowidx.push(i);
                    vals.push(v);
                }
            }
            colptr.push(rowidx.len());
        }
        SparseMat { rows, cols, colptr, rowidx, vals }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.rows * self.cols];
        for j in 0..self.cols {
            for k in self.colptr[j]..self.colptr[j + 1] {
                d[self.rowidx[k] * self.cols + j] += self.vals[k];
            }
        }
        d
    }

    pub fn transpose(&self) -> SparseMat {
        let mut colptr = vec![0usize; self.rows + 1];
        for &r in &self.rowidx {
            colptr[r + 1] += 1;
        }
        for i in 0..self.rows {
            colptr[i + 1] += colptr[i];
        }
        let mut next = colptr.clone();
        let mut rowidx = vec![0; self.nnz()];
        let mut vals = vec![0.0; self.nnz()];
        for j in 0..self.cols {
            for k in self.colptr[j]..self.colptr[j + 1] {
                let r = self.rowidx[k];
                rowidx[next[r]] = j;
                vals[next[r]] = self.vals[k];
                next[r] += 1;
            }
        }
        SparseMat { rows: self.cols, cols: self.rows, colptr, rowidx, vals }
    }

    /// `y = M x`, accumulating column by column.
    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        csc_mul(&self.colptr, &self.rowidx, &self.vals, x, y);
    }

    /// `x = M^T y`, one sequential dot product per column.
    pub fn mul_t(&self, y: &[f64], x: &mut [f64]) {
        csc_mul_t(&self.colptr, &self.rowidx, &self.vals, y, x);
    }

    /// Checks the CSC structure: monotone column pointers, in-range and
    /// strictly increasing row indices, finite values.
    pub fn check(&self, name: &str) -> Result<(), ProblemError> {
        check_csc(name, self.rows, self.cols, &self.colptr, &self.rowidx, &self.vals, false)
    }
}

/// Symmetric matrix stored as its upper triangle in CSC form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym {
    pub n: usize,
    pub colptr: Vec<usize>,
    pub rowidx: Vec<usize>,
    pub vals: Vec<f64>,
}

impl SparseSym {
    pub fn zeros(n: usize) -> Self {
        SparseSym { n, colptr: vec![0; n + 1], rowidx: Vec::new(), vals: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        SparseSym { n, colptr: (0..=n).collect(), rowidx: (0..n).collect(), vals: vec![1.0; n] }
    }

    pub fn diag(d: &[f64]) -> Self {
        let n = d.len();
        SparseSym { n, colptr: (0..=n).collect(), rowidx: (0..n).collect(), vals: d.to_vec() }
    }

    /// Upper triangle of a square row-major dense matrix, keeping nonzeros.
    pub fn from_dense_upper(n: usize, dense: &[f64]) -> Self {
        let m = SparseMat::from_dense(n, n, dense);
        let mut s = SparseSym::zeros(n);
        for j in 0..n {
            for k in m.colptr[j]..m.colptr[j + 1] {
                if m.rowidx[k] <= j {
                    s.rowidx.push(m.rowidx[k]);
                    s.vals.push(m.vals[k]);
                }
            }
            s.colptr[j + 1] = s.rowidx.len();
        }
        s
    }

    /// Builds from upper-triangle triplets (`row <= col`).
    pub fn from_triplets(n: usize, trip: &[(usize, usize, f64)]) -> Result<Self, ProblemError> {
        let m = SparseMat::from_triplets(n, n, trip)?;
        let s = SparseSym { n, colptr: m.colptr, rowidx: m.rowidx, vals: m.vals };
        s.check("triplets")?;
        Ok(s)
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Full row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut d = vec![0.0; n * n];
        for j in 0..n {
            for k in self.colptr[j]..self.colptr[j + 1] {
                let i = self.rowidx[k];
                d[i * n + j] = self.vals[k];
                d[j * n + i] = self.vals[k];
            }
        }
        d
    }

    /// `y = S x` using both triangles.
    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        sym_mul(&self.colptr, &self.rowidx, &self.vals, x, y);
    }

    /// Infinity norm of the full symmetric matrix.
    pub fn norm_inf(&self) -> f64 {
        let mut rows = vec![0.0f64; self.n];
        for j in 0..self.n {
            for k in self.colptr[j]..self.colptr[j + 1] {
                let i = self.rowidx[k];
                rows[i] += self.vals[k].abs();
                if i != j {
                    rows[j] += self.vals[k].abs();
                }
            }
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    pub fn check(&self, name: &str) -> Result<(), ProblemError> {
        check_csc(name, self.n, self.n, &self.colptr, &self.rowidx, &self.vals, true)
    }
}

/// `y = M x` for CSC storage, accumulating column by column.
pub fn csc_mul(colptr: &[usize], rowidx: &[usize], vals: &[f64], x: &[f64], y: &mut [f64]) {
    for v in y.iter_mut() {
        *v = 0.0;
    }
    for j in 0..colptr.len() - 1 {
        for k in colptr[j]..colptr[j + 1] {
            y[rowidx[k]] += vals[k] * x[j];
        }
    }
}

/// `x = M^T y` for CSC storage.
pub fn csc_mul_t(colptr: &[usize], rowidx: &[usize], vals: &[f64], y: &[f64], x: &mut [f64]) {
    for j in 0..colptr.len() - 1 {
        let mut acc = 0.0;
        for k in colptr[j]..colptr[j + 1] {
            acc += vals[k] * y[rowidx[k]];
        }
        x[j] = acc;
    }
}

/// `y = S x` for a symmetric matrix stored as its upper triangle.
pub fn sym_mul(colptr: &[usize], rowidx: &[usize], vals: &[f64], x: &[f64], y: &mut [f64]) {
    for v in y.iter_mut() {
        *v = 0.0;
    }
    for j in 0..colptr.len() - 1 {
        for k in colptr[j]..colptr[j + 1] {
            let i = rowidx[k];
            y[i] += vals[k] * x[j];
            if i != j {
                y[j] += vals[k] * x[i];
            }
        }
    }
}

fn check_csc(
    name: &str,
    rows: usize,
    cols: usize,
    colptr: &[usize],
    rowidx: &[usize],
    vals: &[f64],
    upper: bool,
) -> Result<(), ProblemError> {
    let bad = |col: usize, reason: &str| ProblemError::MalformedCsc {
        matrix: name.to_string(),
        col,
        reason: reason.to_string(),
    };
    if cols.checked_add(1) != Some(colptr.len()) {
        return Err(bad(0, "colptr length must be cols + 1"));
    }
    if colptr[0] != 0 {
        return Err(bad(0, "colptr[0] must be 0"));
    }
    if rowidx.len() != vals.len() {
        return Err(bad(0, "rowidx and vals lengths differ"));
    }
    if colptr[cols] != rowidx.len() {
        return Err(bad(cols, "colptr[cols] must equal nnz"));
    }
    for j in 0..cols {
        if colptr[j + 1] < colptr[j] {
            return Err(bad(j, "colptr not monotone"));
        }
        if colptr[j + 1] > rowidx.len() {
            return Err(bad(j, "colptr exceeds nnz"));
        }
        let mut prev: Option<usize> = None;
        for &r in &rowidx[colptr[j]..colptr[j + 1]] {
            if r >= rows {
                return Err(bad(j, "row index out of range"));
            }
            if upper && r > j {
                return Err(bad(j, "entry below the diagonal"));
            }
            match prev {
                Some(p) if p == r => return Err(bad(j, "duplicate row index")),
                Some(p) if p > r => return Err(bad(j, "row indices not sorted")),
                _ => {}
            }
            prev = Some(r);
        }
    }
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(ProblemError::NonFinite(name.to_string()));
    }
    Ok(())
}

/// A full problem instance.
#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemData {
    pub n: usize,
    pub p: usize,
    pub P: SparseSym,
    pub c: Vec<f64>,
    pub A: SparseMat,
    pub b: Vec<f64>,
    pub G: SparseMat,
    pub h: Vec<f64>,
    pub cones: ConeSpec,
}

impl ProblemData {
    pub fn m(&self) -> usize {
        self.cones.m()
    }

    /// Problem size as used by the benchmarks: `nnz(A) + nnz(G) + nnz(triu P)`.
    pub fn size_metric(&self) -> usize {
        self.A.nnz() + self.G.nnz() + self.P.nnz()
    }

    /// Checks dimensions, CSC structure, finiteness, and that the diagonal of
    /// `P` is nonnegative. Positive semidefiniteness is not checked.
    pub fn validate(&self) -> Result<(), ProblemError> {
        let dim = |s: &str| Err(ProblemError::DimensionMismatch(s.to_string()));
        self.cones.validate()?;
        let m = self.m();
        if self.P.n != self.n {
            return dim("P");
        }
        if self.c.len() != self.n {
            return dim("c");
        }
        if self.A.rows != self.p || self.A.cols != self.n {
            return dim("A");
        }
        if self.b.len() != self.p {
            return dim("b");
        }
        if self.G.rows != m || self.G.cols != self.n {
            return dim("G");
        }
        if self.h.len() != m {
            return dim("h");
        }
        self.P.check("P")?;
        self.A.check("A")?;
        self.G.check("G")?;
        for (name, v) in [("c", &self.c), ("b", &self.b), ("h", &self.h)] {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(ProblemError::NonFinite(name.to_string()));
            }
        }
        for j in 0..self.n {
            for k in self.P.colptr[j]..self.P.colptr[j + 1] {
                if self.P.rowidx[k] == j && self.P.vals[k] < 0.0 {
                    return Err(ProblemError::NegativeDiagonal(j));
                }
            }
        }
        Ok(())
    }

    /// `1/2 x'Px + c'x`
    pub fn objective(&self, x: &[f64]) -> f64 {
        let mut px = vec![0.0; self.n];
        self.P.mul(x, &mut px);
        let mut acc = 0.0;
        for i in 0..self.n {
            acc += 0.5 * x[i] * px[i] + self.c[i] * x[i];
        }
        acc
    }
}

/// Result of a solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub status: Status,
    pub x: Vec<f64>,
    pub s: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub iterations: usize,
    pub primal_obj: f64,
    pub dual_obj: f64,
    /// `||(Ax - b, Gx + s - h)||_inf`
    pub primal_res: f64,
    /// `||Px + c + A'y + G'z||_inf`
    pub dual_res: f64,
    /// `|s'z|`
    pub gap: f64,
    /// Pivots regularized by the wrong-sign branch, summed over iterations.
    pub nreg: usize,
    pub setup_time: f64,
    pub solve_time: f64,
}

impl Solution {
    /// Result for data that failed validation; all vectors are empty.
    pub fn invalid() -> Self {
        Solution {
            status: Status::InvalidData,
            x: Vec::new(),
            s: Vec::new(),
            y: Vec::new(),
            z: Vec::new(),
            iterations: 0,
            primal_obj: f64::NAN,
            dual_obj: f64::NAN,
            primal_res: f64::NAN,
            dual_res: f64::NAN,
            gap: f64::NAN,
            nreg: 0,
            setup_time: 0.0,
            solve_time: 0.0,
        }
    }
}
