mod common;

use common::{dense_solve, norm_inf, random_quasidefinite};
use forge_core::sparse::{
    amd_order, backsolve, factor_nnz, numeric_factor, permute_symmetric, solve_refined, symbolic_factor, LdlFactors,
    Permutation, SymbolicFactor,
};
use forge_core::SparseSym;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 1e-8;

fn star(n: usize) -> SparseSym {
    let mut t: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, i, 4.0)).collect();
    t.extend((1..n).map(|i| (0, i, 1.0)));
    SparseSym::from_triplets(n, &t).unwrap()
}

fn band(n: usize, bw: usize) -> SparseSym {
    let mut t = Vec::new();
    for j in 0..n {
        for i in j.saturating_sub(bw)..=j {
            t.push((i, j, if i == j { 10.0 } else { 1.0 }));
        }
    }
    SparseSym::from_triplets(n, &t).unwrap()
}

fn all_perms(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in all_perms(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Symmetric `perm` of the full dense matrix: `out[i][j] = d[perm[i]][perm[j]]`.
fn dense_permute(n: usize, d: &[f64], perm: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = d[perm[i] * n + perm[j]];
        }
    }
    out
}

/// Max-row-sum norm of `P^T L D L^T P - (K + diag(perturb))`, accumulated
/// column by column of `L`.
fn factor_residual(k: &SparseSym, sym: &SymbolicFactor, f: &LdlFactors) -> f64 {
    let n = k.n;
    let mut diff = vec![0.0f64; n * n];
    for c in 0..n {
        let mut col = vec![(c, 1.0)];
        for j in sym.lp[c]..sym.lp[c + 1] {
            col.push((sym.li[j], f.lx[j]));
        }
        for &(a, la) in &col {
            for &(b, lb) in &col {
                diff[sym.perm.perm[a] * n + sym.perm.perm[b]] += f.d[c] * la * lb;
            }
        }
    }
    let kd = k.to_dense();
    for i in 0..n {
        for j in 0..n {
            diff[i * n + j] -= kd[i * n + j];
        }
    }
    for c in 0..n {
        let o = sym.perm.perm[c];
        diff[o * n + o] -= f.perturb[c];
    }
    (0..n).map(|i| diff[i * n..(i + 1) * n].iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

fn factor_natural_signs(k: &SparseSym, signs: &[f64], perm: Permutation) -> (SymbolicFactor, LdlFactors) {
    let sym = symbolic_factor(k, perm);
    let psigns = sym.perm.apply(signs);
    let f = numeric_factor(&sym.kperm.vals, &sym, &psigns, EPS).unwrap();
    (sym, f)
}

#[test]
fn amd_on_diagonal_is_identity() {
    let p = amd_order(&SparseSym::identity(7));
    assert_eq!(p.perm, (0..7).collect::<Vec<_>>());
}

#[test]
fn amd_orders_star_hub_last_with_minimal_fill() {
    let k = star(5);
    let p = amd_order(&k);
    assert_eq!(*p.perm.last().unwrap(), 0);
    let brute = all_perms(5).into_iter().map(|v| factor_nnz(&k, &Permutation::from_perm(v))).min().unwrap();
    assert_eq!(all_perms(5).len(), 120);
    assert_eq!(brute, 4);
    assert_eq!(factor_nnz(&k, &p), 4);
    assert_eq!(factor_nnz(&k, &Permutation::identity(5)), 10);
}

#[test]
fn amd_keeps_tridiagonal_fill_free() {
    for n in [1, 2, 5, 30] {
        let k = band(n, 1);
        assert_eq!(factor_nnz(&k, &Permutation::identity(n)), n.saturating_sub(1));
        assert_eq!(factor_nnz(&k, &amd_order(&k)), n.saturating_sub(1));
    }
}

#[test]
fn amd_never_worse_than_natural_on_bands() {
    for bw in 1..=5 {
        let k = band(50, bw);
        let amd = factor_nnz(&k, &amd_order(&k));
        let nat = factor_nnz(&k, &Permutation::identity(50));
        assert!(amd <= nat, "bandwidth {bw}: amd {amd} > natural {nat}");
    }
}

#[test]
fn amd_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (k, _) = random_quasidefinite(&mut rng, 30, 20, 0.1);
    assert_eq!(amd_order(&k), amd_order(&k));
}

#[test]
fn permute_with_identity_is_bitwise_noop() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (k, _) = random_quasidefinite(&mut rng, 6, 4, 0.4);
    let (pk, map) = permute_symmetric(&k, &Permutation::identity(10));
    assert_eq!(pk, k);
    assert_eq!(map, (0..k.nnz()).collect::<Vec<_>>());
}

#[test]
fn permute_swaps_two_by_two() {
    let k = SparseSym::from_dense_upper(2, &[1.0, 2.0, 0.0, 3.0]);
    let (pk, map) = permute_symmetric(&k, &Permutation::from_perm(vec![1, 0]));
    assert_eq!(pk.to_dense(), vec![3.0, 2.0, 2.0, 1.0]);
    assert_eq!(pk.vals, vec![3.0, 2.0, 1.0]);
    assert_eq!(map, vec![2, 1, 0]);
}

#[test]
fn permute_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (k, _) = random_quasidefinite(&mut rng, 30, 20, 0.1);
    let mut v: Vec<usize> = (0..50).collect();
    v.shuffle(&mut rng);
    let p = Permutation::from_perm(v);
    let (pk, map) = permute_symmetric(&k, &p);
    for (old, &new) in map.iter().enumerate() {
        assert_eq!(pk.vals[new], k.vals[old]);
    }
    assert_eq!(pk.to_dense(), dense_permute(50, &k.to_dense(), &p.perm));
    let (back, _) = permute_symmetric(&pk, &p.inverse());
    assert_eq!(back, k);
}

#[test]
fn symbolic_of_diagonal_has_no_fill() {
    let sym = symbolic_factor(&SparseSym::identity(4), Permutation::identity(4));
    assert_eq!(sym.nnz_l(), 0);
    assert!(sym.etree.iter().all(|&p| p == usize::MAX));
}

#[test]
fn symbolic_of_dense_three_is_a_chain() {
    let k = SparseSym::from_dense_upper(3, &[1.0; 9]);
    let sym = symbolic_factor(&k, Permutation::identity(3));
    assert_eq!(sym.nnz_l(), 3);
    assert_eq!(sym.etree, vec![1, 2, usize::MAX]);
    assert_eq!(sym.lnz, vec![2, 1, 0]);
    assert_eq!(sym.li, vec![1, 2, 2]);
}

#[test]
fn symbolic_pattern_is_sorted_and_counted() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (k, _) = random_quasidefinite(&mut rng, 25, 15, 0.08);
    let sym = symbolic_factor(&k, amd_order(&k));
    assert_eq!(sym.lnz.iter().sum::<usize>(), sym.nnz_l());
    for c in 0..sym.n {
        let col = &sym.li[sym.lp[c]..sym.lp[c + 1]];
        assert!(col.windows(2).all(|w| w[0] < w[1]));
        assert!(col.iter().all(|&r| r > c));
        assert!(sym.etree[c] == usize::MAX || sym.etree[c] > c);
    }
}

#[test]
fn numeric_diagonal_gets_signed_epsilon() {
    let k = SparseSym::diag(&[1.0, -1.0]);
    let (_, f) = factor_natural_signs(&k, &[1.0, -1.0], Permutation::identity(2));
    assert_eq!(f.d, vec![1.0 + EPS, -1.0 - EPS]);
    assert!(f.lx.is_empty());
    assert_eq!(f.nreg, 0);
}

#[test]
fn zero_pivot_with_positive_sign_is_regularized() {
    let k = SparseSym::diag(&[0.0, -1.0]);
    let (_, f) = factor_natural_signs(&k, &[1.0, -1.0], Permutation::identity(2));
    assert_eq!(f.d[0], EPS);
    assert_eq!(f.nreg, 1);
    assert_eq!(f.perturb[0], EPS);
    assert!((f.perturb[1] + EPS).abs() < 1e-15);
}

#[test]
fn two_by_two_quasidefinite_by_hand() {
    let k = SparseSym::from_dense_upper(2, &[2.0, 1.0, 1.0, -2.0]);
    let (_, f) = factor_natural_signs(&k, &[1.0, -1.0], Permutation::identity(2));
    let d0 = 2.0 + EPS;
    let l = 1.0 / d0;
    assert!((f.lx[0] - 0.5).abs() < 1e-8);
    assert!((f.lx[0] - l).abs() < 1e-15);
    assert!((f.d[0] - d0).abs() < 1e-12);
    assert!((f.d[1] - (-2.0 - l - EPS)).abs() < 1e-12);
    // By hand with eps = 0: D2 = -2 - (1/2)^2 * 2.
    assert!((f.d[1] - (-2.5 - EPS)).abs() < 1e-8);
}

#[test]
fn backsolve_with_identity_factors_is_identity() {
    let k = SparseSym::identity(3);
    let (sym, f) = factor_natural_signs(&k, &[1.0; 3], Permutation::identity(3));
    let x = backsolve(&sym, &f, &[1.0, -2.0, 3.0]);
    for (a, b) in x.iter().zip([1.0, -2.0, 3.0]) {
        assert!((a - b).abs() <= 1e-7);
    }
}

#[test]
fn backsolve_matches_dense_two_by_two() {
    let k = SparseSym::from_dense_upper(2, &[2.0, 1.0, 1.0, -2.0]);
    let (sym, f) = factor_natural_signs(&k, &[1.0, -1.0], Permutation::identity(2));
    let x = backsolve(&sym, &f, &[1.0, 2.0]);
    let d = [2.0 + EPS, 1.0, 1.0, -2.0 - EPS];
    let oracle = dense_solve(2, &d, &[1.0, 2.0]);
    assert!((x[0] - oracle[0]).abs() <= 1e-10 && (x[1] - oracle[1]).abs() <= 1e-10);
}

#[test]
fn backsolve_random_quasidefinite_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let (k, signs) = random_quasidefinite(&mut rng, 60, 40, 0.05);
    let (sym, f) = factor_natural_signs(&k, &signs, amd_order(&k));
    let r: Vec<f64> = (0..100).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let x = backsolve(&sym, &f, &r);
    // K̂ here is the input plus the recorded perturbations.
    let mut kx = vec![0.0; 100];
    k.mul(&x, &mut kx);
    for c in 0..100 {
        let o = sym.perm.perm[c];
        kx[o] += f.perturb[c] * x[o];
    }
    let res: Vec<f64> = kx.iter().zip(&r).map(|(a, b)| a - b).collect();
    assert!(norm_inf(&res) <= 1e-8 * norm_inf(&r));
}

/// Quasidefinite `K`, and `K̂ = K + eps diag(signs)`.
fn regularized_pair(rng: &mut ChaCha8Rng, npos: usize, nneg: usize) -> (SparseSym, SparseSym, Vec<f64>) {
    let (k, signs) = random_quasidefinite(rng, npos, nneg, 0.1);
    let mut kh = k.clone();
    for j in 0..k.n {
        let d = kh.colptr[j + 1] - 1;
        assert_eq!(kh.rowidx[d], j);
        kh.vals[d] += EPS * signs[j];
    }
    (k, kh, signs)
}

#[test]
fn refinement_without_regularization_needs_at_most_one_pass() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let (k, signs) = random_quasidefinite(&mut rng, 30, 20, 0.1);
    let sym = symbolic_factor(&k, amd_order(&k));
    let f = numeric_factor(&sym.kperm.vals, &sym, &sym.perm.apply(&signs), 0.0).unwrap();
    let r: Vec<f64> = (0..50).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let (_, st) = solve_refined(&sym, &f, |x, y| k.mul(x, y), &r, 3, 1e-9);
    assert!(st.passes <= 1);
    assert!(st.residual <= 1e-13 * (1.0 + norm_inf(&r)));
}

#[test]
fn refinement_reduces_unregularized_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let (k, kh, signs) = regularized_pair(&mut rng, 30, 20);
    let sym = symbolic_factor(&kh, amd_order(&kh));
    let f = numeric_factor(&sym.kperm.vals, &sym, &sym.perm.apply(&signs), EPS).unwrap();
    let r: Vec<f64> = (0..50).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let (_, raw) = solve_refined(&sym, &f, |x, y| k.mul(x, y), &r, 0, 1e-9);
    let (_, refined) = solve_refined(&sym, &f, |x, y| k.mul(x, y), &r, 3, 1e-9);
    assert_eq!(raw.passes, 0);
    assert!(refined.residual < raw.residual);
    assert!(refined.residual <= 1e-9 * (1.0 + norm_inf(&r)));
}

#[test]
fn refinement_of_zero_rhs_is_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let (k, kh, signs) = regularized_pair(&mut rng, 5, 5);
    let sym = symbolic_factor(&kh, Permutation::identity(10));
    let f = numeric_factor(&sym.kperm.vals, &sym, &signs, EPS).unwrap();
    let (x, st) = solve_refined(&sym, &f, |x, y| k.mul(x, y), &[0.0; 10], 3, 1e-9);
    assert_eq!(st.passes, 0);
    assert!(x.iter().all(|&v| v == 0.0));
}

#[test]
fn factorization_writes_exactly_the_symbolic_pattern() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let (k, signs) = random_quasidefinite(&mut rng, 20, 15, 0.1);
    let sym = symbolic_factor(&k, amd_order(&k));
    let mut f = LdlFactors::new(&sym, sym.perm.apply(&signs));
    // Canary every slot; a slot the numeric phase skips stays NaN.
    for v in f.lx.iter_mut() {
        *v = f64::NAN;
    }
    f.refactor(&sym, &sym.kperm.vals, EPS).unwrap();
    assert!(f.lx.iter().all(|v| v.is_finite()));

    // Dense LDL of the permuted matrix (with the same perturbations) is
    // exactly zero wherever the symbolic pattern has no slot.
    let n = k.n;
    let a = dense_permute(n, &k.to_dense(), &sym.perm.perm);
    let mut l = vec![0.0f64; n * n];
    let mut d = vec![0.0f64; n];
    for c in 0..n {
        let mut dc = a[c * n + c];
        for j in 0..c {
            dc -= l[c * n + j] * l[c * n + j] * d[j];
        }
        d[c] = dc + f.perturb[c];
        for r in c + 1..n {
            let mut v = a[r * n + c];
            for j in 0..c {
                v -= l[r * n + j] * d[j] * l[c * n + j];
            }
            l[r * n + c] = v / d[c];
        }
    }
    let mut in_pattern = vec![false; n * n];
    for c in 0..n {
        for j in sym.lp[c]..sym.lp[c + 1] {
            in_pattern[sym.li[j] * n + c] = true;
            assert!((l[sym.li[j] * n + c] - f.lx[j]).abs() <= 1e-10 * (1.0 + f.lx[j].abs()));
        }
    }
    for c in 0..n {
        for r in c + 1..n {
            if !in_pattern[r * n + c] {
                assert_eq!(l[r * n + c], 0.0, "fill outside pattern at ({r}, {c})");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factorization_residual_and_signs(seed in any::<u64>(), npos in 1usize..40, nneg in 0usize..40, dens in 0.02f64..0.4, amd in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (k, signs) = random_quasidefinite(&mut rng, npos, nneg, dens);
        let perm = if amd { amd_order(&k) } else { Permutation::identity(k.n) };
        let (sym, f) = factor_natural_signs(&k, &signs, perm);
        prop_assert!(factor_residual(&k, &sym, &f) <= 1e-10 * k.norm_inf());
        for i in 0..k.n {
            prop_assert_eq!(f.d[i].signum(), f.signs[i]);
            prop_assert!(f.d[i].abs() >= EPS);
        }
    }

    #[test]
    fn refinement_residual_never_increases(seed in any::<u64>(), passes in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (k, kh, signs) = regularized_pair(&mut rng, 15, 10);
        let sym = symbolic_factor(&kh, amd_order(&kh));
        let f = numeric_factor(&sym.kperm.vals, &sym, &sym.perm.apply(&signs), EPS).unwrap();
        let r: Vec<f64> = (0..25).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut prev = f64::INFINITY;
        for p in 0..=passes {
            let (_, st) = solve_refined(&sym, &f, |x, y| k.mul(x, y), &r, p, 0.0);
            prop_assert!(st.residual <= prev);
            prev = st.residual;
        }
    }

    #[test]
    fn amd_returns_a_permutation(seed in any::<u64>(), n in 0usize..60, dens in 0.0f64..0.3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, i, 1.0)).collect();
        for j in 0..n {
            for i in 0..j {
                if rng.gen::<f64>() < dens {
                    t.push((i, j, 1.0));
                }
            }
        }
        let k = SparseSym::from_triplets(n, &t).unwrap();
        let p = amd_order(&k);
        let mut seen = p.perm.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..n).collect::<Vec<_>>());
        for i in 0..n {
            prop_assert_eq!(p.iperm[p.perm[i]], i);
        }
    }
}
