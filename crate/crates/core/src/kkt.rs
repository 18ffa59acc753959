//! Assembly of the regularized KKT matrix
//!
//! ```text
//! [ P + es*I   A^T     G^T          ]
//! [ .          -es*I   0            ]
//! [ .          .       -W^T W - es*I ]
//! ```
//!
//! as an upper triangle, and its permuted layout shared by the library
//! backend and the code generator.

use crate::cones::NtScaling;
use crate::problem::{ProblemData, SparseSym};
use crate::runtime::cone;
use crate::sparse::{amd_order, symbolic_factor, Permutation, SymbolicFactor};

/// Where the value of one KKT slot comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotSource {
    /// Diagonal of the (1,1) block: `P[k] + es`, or `es` when `P` has no
    /// entry there.
    PDiag(Option<usize>),
    /// Off-diagonal entry `k` of `P`.
    P(usize),
    /// Entry `k` of `A`, placed in the `A^T` block.
    A(usize),
    /// Entry `k` of `G`, placed in the `G^T` block.
    G(usize),
    /// Diagonal of the equality block: `-es`.
    EqDiag,
    /// Orthant scaling entry `j`: `-(w_j * w_j) - es`.
    Orthant(usize),
    /// Entry `(r, c)`, `r <= c`, of second-order cone `cone`, which starts at
    /// offset `off` and has dimension `dim`: `-(W^T W)_rc`, minus `es` on
    /// the diagonal.
    Soc { cone: usize, off: usize, dim: usize, r: usize, c: usize },
}

impl SlotSource {
    pub fn is_nt(&self) -> bool {
        matches!(self, SlotSource::Orthant(_) | SlotSource::Soc { .. })
    }

    /// Value of a data slot. Panics for scaling slots.
    pub fn data_value(&self, prob: &ProblemData, eps_s: f64) -> f64 {
        match *self {
            SlotSource::PDiag(Some(k)) => prob.P.vals[k] + eps_s,
            SlotSource::PDiag(None) => eps_s,
            SlotSource::P(k) => prob.P.vals[k],
            SlotSource::A(k) => prob.A.vals[k],
            SlotSource::G(k) => prob.G.vals[k],
            SlotSource::EqDiag => -eps_s,
            _ => panic!("not a data slot"),
        }
    }

    /// Value of a scaling slot for `W = I`.
    pub fn nt_identity_value(&self, eps_s: f64) -> f64 {
        match *self {
            SlotSource::Orthant(_) => -1.0 - eps_s,
            SlotSource::Soc { r, c, .. } if r == c => -1.0 - eps_s,
            SlotSource::Soc { .. } => 0.0,
            _ => panic!("not a scaling slot"),
        }
    }

    /// Value of a scaling slot for scaling state `(w, eta)`.
    pub fn nt_value(&self, w: &[f64], eta: &[f64], eps_s: f64) -> f64 {
        match *self {
            SlotSource::Orthant(j) => -(w[j] * w[j]) - eps_s,
            SlotSource::Soc { cone: k, off, dim, r, c } => {
                let v = -cone::soc_wtw(eta[k], &w[off..off + dim], r, c);
                if r == c {
                    v - eps_s
                } else {
                    v
                }
            }
            _ => panic!("not a scaling slot"),
        }
    }
}

/// The KKT matrix in natural ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct KktSystem {
    pub n: usize,
    pub p: usize,
    pub m: usize,
    pub kkt: SparseSym,
    pub sources: Vec<SlotSource>,
    /// `+1` for the first `n` rows, `-1` for the rest.
    pub signs: Vec<f64>,
    pub nt_slots: Vec<usize>,
    pub p_slots: Vec<usize>,
    pub a_slots: Vec<usize>,
    pub g_slots: Vec<usize>,
}

/// Row-wise view of a CSC matrix: for each row, `(col, k)` pairs with `k`
/// the index of the entry in the CSC arrays, sorted by column.
fn rows_of(rows: usize, colptr: &[usize], rowidx: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let mut out = vec![Vec::new(); rows];
    for j in 0..colptr.len() - 1 {
        for k in colptr[j]..colptr[j + 1] {
            out[rowidx[k]].push((j, k));
        }
    }
    out
}

/// Builds the KKT pattern with identity scaling blocks.
pub fn assemble_kkt(prob: &ProblemData, eps_s: f64) -> KktSystem {
    let (n, p, m) = (prob.n, prob.p, prob.m());
    let nk = n + p + m;
    let mut colptr = Vec::with_capacity(nk + 1);
    let mut rowidx = Vec::new();
    let mut sources = Vec::new();
    colptr.push(0);
    let mut push = |row: usize, src: SlotSource, rowidx: &mut Vec<usize>| {
        rowidx.push(row);
        sources.push(src);
    };
    for j in 0..n {
        let mut diag = None;
        for k in prob.P.colptr[j]..prob.P.colptr[j + 1] {
            let i = prob.P.rowidx[k];
            if i == j {
                diag = Some(k);
            } else {
                push(i, SlotSource::P(k), &mut rowidx);
            }
        }
        push(j, SlotSource::PDiag(diag), &mut rowidx);
        colptr.push(rowidx.len());
    }
    for (i, row) in rows_of(p, &prob.A.colptr, &prob.A.rowidx).into_iter().enumerate() {
        for (j, k) in row {
            push(j, SlotSource::A(k), &mut rowidx);
        }
        push(n + i, SlotSource::EqDiag, &mut rowidx);
        colptr.push(rowidx.len());
    }
    let grows = rows_of(m, &prob.G.colptr, &prob.G.rowidx);
    let l = prob.cones.l;
    let offs = prob.cones.soc_offsets();
    for (r, row) in grows.into_iter().enumerate() {
        for (j, k) in row {
            push(j, SlotSource::G(k), &mut rowidx);
        }
        if r < l {
            push(n + p + r, SlotSource::Orthant(r), &mut rowidx);
        } else {
            let cone = offs.partition_point(|&o| o <= r) - 1;
            let (off, dim) = (offs[cone], prob.cones.q[cone]);
            for rr in off..=r {
                push(n + p + rr, SlotSource::Soc { cone, off, dim, r: rr - off, c: r - off }, &mut rowidx);
            }
        }
        colptr.push(rowidx.len());
    }
    let mut vals = vec![0.0; sources.len()];
    let mut nt_slots = Vec::new();
    let mut p_slots = vec![0; prob.P.nnz()];
    let mut a_slots = vec![0; prob.A.nnz()];
    let mut g_slots = vec![0; prob.G.nnz()];
    for (slot, src) in sources.iter().enumerate() {
        match *src {
            SlotSource::PDiag(Some(k)) | SlotSource::P(k) => p_slots[k] = slot,
            SlotSource::A(k) => a_slots[k] = slot,
            SlotSource::G(k) => g_slots[k] = slot,
            _ => {}
        }
        vals[slot] = if src.is_nt() {
            nt_slots.push(slot);
            src.nt_identity_value(eps_s)
        } else {
            src.data_value(prob, eps_s)
        };
    }
    let mut signs = vec![1.0; nk];
    for s in signs[n..].iter_mut() {
        *s = -1.0;
    }
    KktSystem {
        n,
        p,
        m,
        kkt: SparseSym { n: nk, colptr, rowidx, vals },
        sources,
        signs,
        nt_slots,
        p_slots,
        a_slots,
        g_slots,
    }
}

/// Writes `-W^T W - es I` into the scaling slots.
pub fn update_kkt_nt(kkt: &mut KktSystem, scaling: &NtScaling, eps_s: f64) {
    for &slot in &kkt.nt_slots {
        kkt.kkt.vals[slot] = kkt.sources[slot].nt_value(&scaling.w, &scaling.eta, eps_s);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ordering {
    #[default]
    Amd,
    Natural,
}

/// Permuted KKT structure: everything that depends on the sparsity pattern
/// and cones but not on the data values.
#[derive(Debug, Clone, PartialEq)]
pub struct KktLayout {
    pub n: usize,
    pub p: usize,
    pub m: usize,
    pub l: usize,
    pub q: Vec<usize>,
    pub sym: SymbolicFactor,
    /// Source of every slot of `sym.kperm`.
    pub sources: Vec<SlotSource>,
    /// Expected pivot signs in permuted order.
    pub signs: Vec<f64>,
    pub nt_slots: Vec<usize>,
    pub data_slots: Vec<usize>,
}

impl KktLayout {
    pub fn new(prob: &ProblemData, ordering: Ordering) -> KktLayout {
        let kkt = assemble_kkt(prob, 0.0);
        let perm = match ordering {
            Ordering::Amd => amd_order(&kkt.kkt),
            Ordering::Natural => Permutation::identity(kkt.kkt.n),
        };
        let mut sym = symbolic_factor(&kkt.kkt, perm);
        // Values live in the backend; the layout is structure only.
        sym.kperm.vals.iter_mut().for_each(|v| *v = 0.0);
        let mut sources = vec![SlotSource::EqDiag; kkt.sources.len()];
        for (k, src) in kkt.sources.iter().enumerate() {
            sources[sym.kmap[k]] = *src;
        }
        let signs = sym.perm.apply(&kkt.signs);
        let nt_slots = (0..sources.len()).filter(|&s| sources[s].is_nt()).collect();
        let data_slots = (0..sources.len()).filter(|&s| !sources[s].is_nt()).collect();
        KktLayout {
            n: kkt.n,
            p: kkt.p,
            m: kkt.m,
            l: prob.cones.l,
            q: prob.cones.q.clone(),
            sym,
            sources,
            signs,
            nt_slots,
            data_slots,
        }
    }

    pub fn dim(&self) -> usize {
        self.n + self.p + self.m
    }

    pub fn nnz_kkt(&self) -> usize {
        self.sources.len()
    }
}
