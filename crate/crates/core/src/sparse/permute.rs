use super::Permutation;
use crate::problem::SparseSym;

/// Upper triangle of `P K P^T` together with `map`, where `map[k]` is the
/// position in the result of entry `k` of `k_mat`.
pub fn permute_symmetric(k_mat: &SparseSym, perm: &Permutation) -> (SparseSym, Vec<usize>) {
    let n = k_mat.n;
    let nnz = k_mat.nnz();
    let mut entries: Vec<(usize, usize, usize)> = Vec::with_capacity(nnz);
    for j in 0..n {
        for k in k_mat.colptr[j]..k_mat.colptr[j + 1] {
            let a = perm.iperm[k_mat.rowidx[k]];
            let b = perm.iperm[j];
            let (r, c) = if a <= b { (a, b) } else { (b, a) };
            entries.push((c, r, k));
        }
    }
    entries.sort_unstable();
    let mut out = SparseSym::zeros(n);
    out.rowidx.reserve(nnz);
    out.vals.reserve(nnz);
    let mut map = vec![0; nnz];
    for (pos, &(c, r, k)) in entries.iter().enumerate() {
        out.colptr[c + 1] += 1;
        out.rowidx.push(r);
        out.vals.push(k_mat.vals[k]);
        map[k] = pos;
    }
    for j in 0..n {
        out.colptr[j + 1] += out.colptr[j];
    }
    (out, map)
}
