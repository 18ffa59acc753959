//! Generated solvers driven through their update API stay in step with the
//! library solver given the same new data.

use forge_bench::Class;
use forge_core::{Settings, Solver, Status};
use forge_fixtures::cases::{toy_problem, CLASS_SEED};
use forge_fixtures::{oscmass, toy};

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn toy_update_c_matches_library() {
    let mut lib = Solver::new(toy_problem(), Settings::default()).unwrap();
    let mut ws = toy::Workspace::new();
    toy::load_data(&mut ws);
    for shift in [0.0, 0.5, -0.3, 2.0] {
        let c = [shift, 0.0, -shift, 1.0];
        lib.update_c(&c).unwrap();
        toy::update_c(&mut ws, &c);
        let sol = lib.solve();
        assert_eq!(toy::solve(&mut ws), toy::Status::Optimal);
        assert_eq!(sol.status, Status::Optimal);
        assert_eq!(ws.info.iters, sol.iterations, "shift {shift}");
        assert!(max_diff(ws.x(), &sol.x) <= 1e-9, "shift {shift}");
        assert!(max_diff(ws.z(), &sol.z) <= 1e-9, "shift {shift}");
    }
}

#[test]
fn oscmass_update_b_matches_library() {
    // b holds the dynamics (zero) then the initial state.
    let prob = Class::Oscmass.generate(Class::Oscmass.smallest(), CLASS_SEED);
    let mut lib = Solver::new(prob.clone(), Settings::default()).unwrap();
    let mut ws = Box::new(oscmass::Workspace::new());
    oscmass::load_data(&mut ws);
    let mut b = oscmass::B_DEFAULT;
    for k in 0..3 {
        for v in &mut b[oscmass::P - 8..] {
            *v *= 0.5 + 0.2 * k as f64;
        }
        lib.update_b(&b).unwrap();
        oscmass::update_b(&mut ws, &b);
        let sol = lib.solve();
        assert_eq!(oscmass::solve(&mut ws), oscmass::Status::Optimal);
        assert_eq!(ws.info.iters, sol.iterations);
        assert!(max_diff(ws.x(), &sol.x) <= 1e-9 * (1.0 + sol.x.iter().fold(0.0f64, |m, v| m.max(v.abs()))));
    }
}

#[test]
fn repeated_solves_are_bitwise_identical() {
    let mut ws = toy::Workspace::new();
    toy::load_data(&mut ws);
    toy::solve(&mut ws);
    let first: Vec<u64> = ws.x().iter().map(|v| v.to_bits()).collect();
    for _ in 0..3 {
        toy::solve(&mut ws);
        assert_eq!(ws.x().iter().map(|v| v.to_bits()).collect::<Vec<_>>(), first);
    }
}

#[test]
fn settings_reach_the_generated_solver() {
    let mut ws = toy::Workspace::new();
    toy::load_data(&mut ws);
    ws.settings.max_iters = 1;
    assert_eq!(toy::solve(&mut ws), toy::Status::MaxIters);
    toy::set_default_settings(&mut ws);
    assert_eq!(toy::solve(&mut ws), toy::Status::Optimal);
}
