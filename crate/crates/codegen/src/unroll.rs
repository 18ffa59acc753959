//! Unrollers: trace the library's sparse loops on a fixed pattern and record
//! the scalar operations they perform, in the order they perform them.

use forge_core::sparse::SymbolicFactor;
use forge_core::{SparseMat, SparseSym};

use crate::ir::{slot, Acc, Arr, KernelProgram, Op};

fn lens(x: usize, y: usize, vals: usize) -> [usize; 7] {
    [x, y, vals, 0, 0, 0, 0]
}

/// Emits one statement per output entry: a product chain over `terms`
/// `(value index, input index)`, or a zero store when there are none.
fn accumulate(prog: &mut KernelProgram, out: usize, terms: &[(usize, usize)]) {
    let dst = slot(Arr::Y, out);
    match terms.split_first() {
        None => prog.push(Op::Zero(dst)),
        Some((&(k, j), rest)) => {
            prog.push(Op::Mul { dst, a: slot(Arr::Vals, k), b: slot(Arr::X, j) });
            for &(k, j) in rest {
                prog.push(Op::Mac { dst, acc: Acc::Dst, neg: false, a: slot(Arr::Vals, k), b: slot(Arr::X, j) });
            }
        }
    }
}

/// `y = M x`, or `y = M^T x` when `transpose`, for the pattern of `m`.
///
/// Each output entry accumulates its terms in the order the CSC loops of
/// the library visit them. The library starts each sum from `0.0`, so the
/// two agree exactly except possibly in the sign of a zero result.
pub fn unroll_spmv(m: &SparseMat, transpose: bool) -> KernelProgram {
    if transpose {
        let mut prog = KernelProgram::new(lens(m.rows, m.cols, m.nnz()));
        for j in 0..m.cols {
            let terms: Vec<_> = (m.colptr[j]..m.colptr[j + 1]).map(|k| (k, m.rowidx[k])).collect();
            accumulate(&mut prog, j, &terms);
        }
        prog
    } else {
        let mut rows = vec![Vec::new(); m.rows];
        for j in 0..m.cols {
            for k in m.colptr[j]..m.colptr[j + 1] {
                rows[m.rowidx[k]].push((k, j));
            }
        }
        let mut prog = KernelProgram::new(lens(m.cols, m.rows, m.nnz()));
        for (i, terms) in rows.iter().enumerate() {
            accumulate(&mut prog, i, terms);
        }
        prog
    }
}

/// `y = S x` for a symmetric matrix stored as its upper triangle; each
/// off-diagonal entry contributes to two outputs.
pub fn unroll_symv(s: &SparseSym) -> KernelProgram {
    let mut rows = vec![Vec::new(); s.n];
    for j in 0..s.n {
        for k in s.colptr[j]..s.colptr[j + 1] {
            let i = s.rowidx[k];
            rows[i].push((k, j));
            if i != j {
                rows[j].push((k, i));
            }
        }
    }
    let mut prog = KernelProgram::new(lens(s.n, s.n, s.nnz()));
    for (i, terms) in rows.iter().enumerate() {
        accumulate(&mut prog, i, terms);
    }
    prog
}

/// Up-looking `LDL^T` of the permuted KKT values (`Vals`, laid out as
/// `sym.kperm`) into `Lx`, `D`, `Dinv`, with expected pivot signs `signs`.
///
/// The trace replays the library's column loop, elimination-tree reach
/// included, so every floating-point operation happens in the same order.
/// Entries of the accumulator that the library would read as an untouched
/// `0.0` are tracked here and rendered as literal zeros.
pub fn unroll_ldl(sym: &SymbolicFactor, signs: &[f64]) -> KernelProgram {
    const NONE: usize = usize::MAX;
    let n = sym.n;
    let (ap, ai) = (&sym.kperm.colptr, &sym.kperm.rowidx);
    let (lp, li, etree) = (&sym.lp, &sym.li, &sym.etree);
    let mut prog = KernelProgram::new([0, 0, sym.kperm.nnz(), sym.nnz_l(), n, n, n]);
    let mut live = vec![false; n];
    let mut marker = vec![false; n];
    let mut yidx = Vec::with_capacity(n);
    let mut ebuf = Vec::with_capacity(n);
    let mut next = lp[..n].to_vec();
    let y = |i| slot(Arr::Scratch, i);
    for k in 0..n {
        let dk = slot(Arr::D, k);
        let mut d_live = false;
        yidx.clear();
        for t in ap[k]..ap[k + 1] {
            let b = ai[t];
            if b == k {
                prog.push(Op::Copy { dst: dk, src: slot(Arr::Vals, t) });
                d_live = true;
                continue;
            }
            prog.push(Op::Copy { dst: y(b), src: slot(Arr::Vals, t) });
            live[b] = true;
            if !marker[b] {
                marker[b] = true;
                ebuf.clear();
                ebuf.push(b);
                let mut i = etree[b];
                while i != NONE && i < k && !marker[i] {
                    marker[i] = true;
                    ebuf.push(i);
                    i = etree[i];
                }
                yidx.extend(ebuf.drain(..).rev());
            }
        }
        for &c in yidx.iter().rev() {
            if !live[c] {
                prog.push(Op::Zero(y(c)));
            }
            let end = next[c];
            for j in lp[c]..end {
                let r = li[j];
                let acc = if live[r] { Acc::Dst } else { Acc::Zero };
                prog.push(Op::Mac { dst: y(r), acc, neg: true, a: slot(Arr::Lx, j), b: y(c) });
                live[r] = true;
            }
            let lend = slot(Arr::Lx, end);
            prog.push(Op::Mul { dst: lend, a: y(c), b: slot(Arr::Dinv, c) });
            let acc = if d_live { Acc::Dst } else { Acc::Zero };
            prog.push(Op::Mac { dst: dk, acc, neg: true, a: y(c), b: lend });
            d_live = true;
            next[c] += 1;
            live[c] = false;
            marker[c] = false;
        }
        if !d_live {
            prog.push(Op::Zero(dk));
        }
        prog.push(Op::Regularize { dst: dk, positive: signs[k] > 0.0 });
        prog.push(Op::CheckFinite(dk));
        prog.push(Op::Recip { dst: slot(Arr::Dinv, k), src: dk });
    }
    prog
}

/// In-place solve `L D L^T y = rhs` on `Y`, matching the library's
/// forward, diagonal and backward sweeps.
pub fn unroll_ldl_solve(sym: &SymbolicFactor) -> KernelProgram {
    let n = sym.n;
    let (lp, li) = (&sym.lp, &sym.li);
    let mut prog = KernelProgram::new([0, n, 0, sym.nnz_l(), 0, n, 0]);
    let x = |i| slot(Arr::Y, i);
    for i in 0..n {
        for j in lp[i]..lp[i + 1] {
            prog.push(Op::Mac { dst: x(li[j]), acc: Acc::Dst, neg: true, a: slot(Arr::Lx, j), b: x(i) });
        }
    }
    for i in 0..n {
        prog.push(Op::Mul { dst: x(i), a: x(i), b: slot(Arr::Dinv, i) });
    }
    for i in (0..n).rev() {
        for j in lp[i]..lp[i + 1] {
            prog.push(Op::Mac { dst: x(i), acc: Acc::Dst, neg: true, a: slot(Arr::Lx, j), b: x(li[j]) });
        }
    }
    prog
}
