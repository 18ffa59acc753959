use forge_bench::problems::lqr::{lqr_kkt, EPS, NU, NX};
use forge_bench::problems::oscmass::{continuous, damping_certifies, discretize, DT, X_MAX};
use forge_bench::problems::{
    cone_margin, gen_group_lasso, gen_lcvx, gen_oscillating_masses, gen_portfolio, gen_robust_kalman,
    gen_robust_kalman_noiseless, lasso, lcvx, portfolio, rkf, Class, ALL_CLASSES,
};
use forge_codegen::ir::{Arr, Memory};
use forge_codegen::unroll_ldl;
use forge_core::sparse::{amd_order, numeric_factor, symbolic_factor};
use forge_core::{solve, Settings, Solution, Status};
use nalgebra::DMatrix;

fn solved(class: Class, size: usize, seed: u64) -> (forge_core::ProblemData, Solution) {
    let p = class.generate(size, seed);
    let s = solve(&p, &Settings::default());
    assert_eq!(s.status, Status::Optimal, "{class} size {size} seed {seed}");
    (p, s)
}

#[test]
fn generators_are_deterministic_per_seed() {
    for c in ALL_CLASSES {
        let n = c.smallest();
        assert_eq!(c.generate(n, 7), c.generate(n, 7), "{c}");
        assert_ne!(c.generate(n, 7), c.generate(n, 8), "{c}");
    }
}

#[test]
fn every_generated_problem_validates() {
    for c in ALL_CLASSES {
        for &size in &c.sizes()[..2] {
            c.generate(size, 3).validate().unwrap_or_else(|e| panic!("{c} {size}: {e}"));
        }
    }
}

#[test]
fn class_names_round_trip() {
    for c in ALL_CLASSES {
        assert_eq!(c.name().parse::<Class>().unwrap(), c);
    }
    assert!("qp".parse::<Class>().is_err());
    assert_eq!(ALL_CLASSES.map(Class::smallest), [25, 15, 1, 2, 8]);
}

#[test]
fn dimensions_follow_the_models() {
    // Robust Kalman: states x_0..x_N, then w, v (2 each), a, b per step.
    let p = gen_robust_kalman(25, 0);
    assert_eq!((p.n, p.p, p.cones.l, p.cones.q.len()), (4 * 26 + 6 * 25, 6 * 25, 25, 25));
    // Guidance: 6 states and a log-mass for k <= T, 3 thrusts and a slack for k < T.
    let p = gen_lcvx(15, 0);
    assert_eq!((p.n, p.p, p.cones.l), (7 * 16 + 4 * 15, 7 * 15 + 7, 4 * 15 + 1));
    assert_eq!(p.cones.q, [3, 4].repeat(15));
    // Lasso: 10 coefficients, 1 bound and 250 residuals per group.
    let p = gen_group_lasso(2, 0);
    assert_eq!((p.n, p.p, p.cones.q.as_slice()), (2 * 261, 500, &[11, 11][..]));
    // Portfolio: 100 assets per factor plus the factor exposures.
    let p = gen_portfolio(2, 0);
    assert_eq!((p.n, p.p, p.cones.l), (202, 3, 200));
    // Oscillating masses: (T+1) * 2N states and T * N forces.
    let p = gen_oscillating_masses(8, 0);
    assert_eq!(p.n, 9 * 8 + 8 * 4);
    assert_eq!(p.n, 104);
    assert_eq!((p.p, p.cones.l), (72, 208));
}

#[test]
fn size_metric_counts_the_upper_triangle_of_p_once() {
    let p = gen_portfolio(2, 1);
    assert_eq!(p.size_metric(), p.A.nnz() + p.G.nnz() + 202);
}

#[test]
fn lasso_data_has_the_requested_density() {
    let p = gen_group_lasso(4, 2);
    let lay = lasso::Layout { groups: 4 };
    // A carries x's entries plus one -1 per residual.
    let data_nnz = p.A.nnz() - lay.rows();
    let frac = data_nnz as f64 / (lay.rows() * 40) as f64;
    assert!((frac - lasso::DENSITY).abs() < 0.01, "density {frac}");
}

#[test]
fn huber_matches_its_epigraph_minimum() {
    // Brute-force min over a of a^2 + 2 rho max(||z|| - a, 0).
    for r in [0.0, 0.3, 1.0, 1.99, 2.0, 2.5, 7.0] {
        let z = [r * 0.6, r * 0.8];
        let best = (0..=40_000)
            .map(|i| {
                let a = i as f64 * 1e-3 - 10.0;
                a * a + 2.0 * rkf::RHO * (r - a).max(0.0)
            })
            .fold(f64::INFINITY, f64::min);
        assert!((rkf::huber(&z) - best).abs() < 1e-5, "r = {r}");
    }
    assert_eq!(rkf::huber(&[3.0, 0.0]), 2.0 * 2.0 * 3.0 - 4.0);
}

#[test]
fn smallest_robust_kalman_solves_and_matches_huber_objective() {
    for seed in 0..3 {
        let (p, s) = solved(Class::Rkf, 25, seed);
        Class::Rkf.audit(25, &p, &s, 1e-6).unwrap();
    }
}

#[test]
fn noiseless_robust_kalman_recovers_zero_forces() {
    let p = gen_robust_kalman_noiseless(25, [1.0, -1.0, 0.5, -0.25]);
    let s = solve(&p, &Settings::default());
    assert_eq!(s.status, Status::Optimal);
    assert!(s.primal_obj.abs() < 1e-6, "objective {}", s.primal_obj);
    let lay = rkf::Layout { steps: 25 };
    let w = &s.x[lay.w(0)..lay.w(0) + 50];
    assert!(w.iter().all(|v| v.abs() < 1e-6));
}

#[test]
fn guidance_solution_respects_thrust_and_mass_bounds() {
    for seed in 0..3 {
        let (p, s) = solved(Class::Lcvx, 15, seed);
        Class::Lcvx.audit(15, &p, &s, 1e-6).unwrap();
        let lay = lcvx::Layout { steps: 15 };
        for k in 0..15 {
            let u = &s.x[lay.u(k)..lay.u(k) + 3];
            assert!((u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt() <= s.x[lay.sigma(k)] + 1e-6);
        }
        assert!(s.x[lay.z(15)] >= lcvx::M_DRY.ln() - 1e-6);
    }
}

#[test]
fn guidance_initial_state_is_drawn_from_the_stated_ranges() {
    for seed in 0..10 {
        let p = gen_lcvx(15, seed);
        let x0 = &p.b[7 * 15..7 * 15 + 6];
        assert!(x0[0].abs() <= 10.0 && x0[1].abs() <= 10.0);
        assert!((200.0..=400.0).contains(&x0[2]));
        assert_eq!(&x0[3..], &[0.0; 3]);
        assert_eq!(p.b[7 * 15 + 6], lcvx::M_WET.ln());
    }
}

#[test]
fn group_bounds_are_tight_at_the_lasso_solution() {
    for seed in 0..3 {
        let (p, s) = solved(Class::Lasso, 1, seed);
        Class::Lasso.audit(1, &p, &s, 1e-6).unwrap();
    }
    let (p, s) = solved(Class::Lasso, 2, 0);
    Class::Lasso.audit(2, &p, &s, 1e-6).unwrap();
}

#[test]
fn portfolio_weights_sum_to_one() {
    for seed in 0..3 {
        let (_, s) = solved(Class::Portfolio, 2, seed);
        let total: f64 = s.x[..portfolio::Layout { factors: 2 }.assets()].iter().sum();
        assert!((total - 1.0).abs() <= 1e-8, "sum {total}");
    }
}

#[test]
fn portfolio_variances_are_nonnegative() {
    let p = gen_portfolio(4, 5);
    assert!(p.P.vals.iter().all(|&v| v >= 0.0));
}

#[test]
fn oscillating_masses_stay_in_their_boxes() {
    for seed in 0..3 {
        let (p, s) = solved(Class::Oscmass, 8, seed);
        Class::Oscmass.audit(8, &p, &s, 1e-6).unwrap();
    }
}

#[test]
fn oscillating_masses_initial_state_is_certified_and_clipped() {
    for seed in 0..20 {
        let p = gen_oscillating_masses(8, seed);
        let x0 = &p.b[64..72];
        assert!(x0.iter().all(|v| v.abs() <= 0.9 * X_MAX));
        assert!(damping_certifies(8, x0));
    }
}

#[test]
fn infeasible_initial_state_is_not_certified() {
    // Every mass at the clip value moving outward: position 1.8 plus 0.25 s
    // at velocity 1.8 exceeds the box whatever force is applied.
    let mut x0 = [0.9 * X_MAX; 8];
    x0[4..].fill(0.9 * X_MAX);
    assert!(!damping_certifies(8, &x0));
}

/// `sum_k M^k / k!`, summed until the terms vanish.
fn exp_series(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut term = DMatrix::identity(n, n);
    let mut sum = term.clone();
    for k in 1..60 {
        term = &term * m / k as f64;
        sum += &term;
    }
    sum
}

#[test]
fn discretization_matches_series_oracles() {
    let (ac, bc) = continuous();
    let (a, b) = discretize(DT);
    let a_ref = exp_series(&(&ac * DT));
    assert!((&a - &a_ref).amax() <= 1e-12, "A error {}", (&a - &a_ref).amax());
    // B = (sum_k A_c^k dt^(k+1) / (k+1)!) B_c, with no matrix inverse.
    let mut term = DMatrix::identity(8, 8) * DT;
    let mut int = term.clone();
    for k in 1..60 {
        term = &term * &ac * DT / (k + 1) as f64;
        int += &term;
    }
    let b_ref = int * bc;
    assert!((&b - &b_ref).amax() <= 1e-12, "B error {}", (&b - &b_ref).amax());
    let (a0, _) = discretize(0.0);
    assert_eq!(a0, DMatrix::identity(8, 8));
}

#[test]
fn lqr_kkt_has_the_block_structure() {
    let t = 5;
    let k = lqr_kkt(t, 0);
    let (nv, nc) = (k.nvars(), k.ncons());
    assert_eq!((nv, nc), (6 * 5 + 3 * 4, 30));
    assert_eq!(k.kkt.n, 72);
    // P diagonal, four dynamics blocks of 6 rows x (6 + 1 + 3) entries, the
    // initial-state identity, and the -eps diagonal.
    assert_eq!(k.kkt.nnz(), nv + 4 * NX * (NX + 1 + NU) + NX + nc);
    let dense = k.kkt.to_dense();
    let at = |i: usize, j: usize| dense[i * 72 + j];
    for i in 0..72 {
        for j in 0..72 {
            assert_eq!(at(i, j), at(j, i));
        }
    }
    for j in 0..nv {
        assert_eq!(at(j, j), 1.0);
    }
    for j in nv..72 {
        assert_eq!(at(j, j), -EPS);
    }
    // Row 0 of H is A row 0 on x_1, -1 on x_2[0], B row 0 on u_1.
    assert_eq!(at(nv, 6), -1.0);
    assert!((0..6).all(|j| at(nv, j) != 0.0));
    assert!((30..33).all(|j| at(nv, j) != 0.0));
    assert!((7..30).all(|j| at(nv, j) == 0.0));
    // The last block row of H is the identity on x_1.
    for i in 0..6 {
        assert_eq!(at(nv + 24 + i, i), 1.0);
    }
    // The (1,1) and (2,2) blocks are diagonal.
    for i in 0..72 {
        for j in 0..72 {
            if i != j && (i < nv) == (j < nv) {
                assert_eq!(at(i, j), 0.0, "({i}, {j})");
            }
        }
    }
    assert_eq!(k.signs.iter().filter(|&&s| s > 0.0).count(), nv);
}

#[test]
fn lqr_factor_by_library_and_unrolled_kernel_agree_bitwise() {
    for t in [5, 15] {
        let k = lqr_kkt(t, 1);
        let sym = symbolic_factor(&k.kkt, amd_order(&k.kkt));
        let signs = sym.perm.apply(&k.signs);
        let lib = numeric_factor(&sym.kperm.vals, &sym, &signs, 1e-8).unwrap();
        let prog = unroll_ldl(&sym, &signs);
        let mut mem = Memory::for_program(&prog);
        mem.set(Arr::Vals, &sym.kperm.vals);
        assert_eq!(mem.run(&prog, 1e-8), Some(lib.nreg));
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(mem.get(Arr::Lx)), bits(&lib.lx), "T = {t}");
        assert_eq!(bits(mem.get(Arr::D)), bits(&lib.d), "T = {t}");
    }
}

#[test]
fn cone_margin_measures_distance_inside() {
    let p = gen_group_lasso(1, 0);
    let mut v = vec![0.0; 11];
    v[0] = 2.0;
    v[1] = 1.0;
    assert_eq!(cone_margin(&v, &p), 1.0);
    v[0] = 0.5;
    assert_eq!(cone_margin(&v, &p), -0.5);
}
