use forge_bench::metrics::{normalize, performance_profiles, shifted_geometric_mean};
use proptest::prelude::*;

#[test]
fn sgm_of_one_and_three() {
    let g = shifted_geometric_mean(&[1.0, 3.0], &[false, false], 1.0, 10.0);
    assert!((g - (2.0 * 2f64.sqrt() - 1.0)).abs() <= 1e-12);
}

#[test]
fn sgm_of_constant_times_is_the_time() {
    for t in [0.001, 0.5, 4.0] {
        let g = shifted_geometric_mean(&[t; 7], &[false; 7], 1.0, 10.0);
        assert!((g - t).abs() <= 1e-12);
    }
}

#[test]
fn failures_are_charged_the_cap() {
    // The recorded time of a failed solve is ignored in favour of the cap.
    let g = shifted_geometric_mean(&[1.0, 0.001], &[false, true], 1.0, 10.0);
    assert!((g - ((2.0f64 * 11.0).sqrt() - 1.0)).abs() <= 1e-12);
    let all_failed = shifted_geometric_mean(&[0.1, 0.2, 0.3], &[true; 3], 1.0, 10.0);
    assert!((all_failed - 10.0).abs() <= 1e-12);
}

#[test]
fn fastest_solver_normalizes_to_one() {
    let r = normalize(&[0.4, 0.2, 0.8]);
    assert_eq!(r, vec![2.0, 1.0, 4.0]);
}

#[test]
fn single_solver_is_always_fastest() {
    let p = performance_profiles(&[vec![0.3, 0.1, 2.0]], &[vec![false; 3]]);
    assert_eq!(p.relative[0].at(1.0), 1.0);
    assert_eq!(p.absolute[0].at(0.1), 1.0 / 3.0);
    assert_eq!(p.absolute[0].at(2.0), 1.0);
}

#[test]
fn two_solvers_each_fastest_once() {
    let times = [vec![1.0, 2.0], vec![2.0, 1.0]];
    let p = performance_profiles(&times, &[vec![false; 2], vec![false; 2]]);
    for c in &p.relative {
        assert_eq!(c.at(1.0), 0.5);
        assert_eq!(c.at(1.999), 0.5);
        assert_eq!(c.at(2.0), 1.0);
        assert_eq!(c.at(0.5), 0.0);
    }
}

#[test]
fn failed_solves_never_count() {
    // Solver 0 fails problem 1; solver 1 is then fastest there alone.
    let times = [vec![1.0, 0.01], vec![3.0, 2.0]];
    let failed = [vec![false, true], vec![false, false]];
    let p = performance_profiles(&times, &failed);
    assert_eq!(p.relative[0].terminal(), 0.5);
    assert_eq!(p.relative[0].at(1e9), 0.5);
    assert_eq!(p.relative[1].at(1.0), 0.5);
    assert_eq!(p.relative[1].at(3.0), 1.0);
    assert_eq!(p.absolute[0].at(1.0), 0.5);
}

fn instance() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<Vec<bool>>)> {
    (1usize..4, 1usize..8).prop_flat_map(|(s, p)| {
        (
            prop::collection::vec(prop::collection::vec(1e-4f64..10.0, p), s),
            prop::collection::vec(prop::collection::vec(prop::bool::weighted(0.2), p), s),
        )
    })
}

proptest! {
    #[test]
    fn profiles_are_monotone_and_end_at_the_success_rate((times, failed) in instance()) {
        let p = performance_profiles(&times, &failed);
        let np = times[0].len() as f64;
        for (s, (rel, abs)) in p.relative.iter().zip(&p.absolute).enumerate() {
            let rate = failed[s].iter().filter(|&&f| !f).count() as f64 / np;
            for c in [rel, abs] {
                prop_assert!(c.values.windows(2).all(|w| w[0] <= w[1]));
                prop_assert!(c.values.iter().all(|&v| (0.0..=1.0).contains(&v)));
                prop_assert!((c.terminal() - rate).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sgm_is_invariant_under_permutation(
        times in prop::collection::vec(1e-4f64..100.0, 1..20),
        rot in 0usize..20,
    ) {
        let failed = vec![false; times.len()];
        let mut perm = times.clone();
        perm.rotate_left(rot % times.len());
        perm.reverse();
        let a = shifted_geometric_mean(&times, &failed, 1.0, 10.0);
        let b = shifted_geometric_mean(&perm, &failed, 1.0, 10.0);
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        let lo = times.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = times.iter().copied().fold(0.0, f64::max);
        prop_assert!(a >= lo - 1e-12 && a <= hi + 1e-12);
    }
}
