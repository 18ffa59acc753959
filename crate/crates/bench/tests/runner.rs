use forge_bench::external::{parse_runtest, run_generated};
use forge_bench::runner::{profiles, sgm_table};
use forge_bench::svg::profiles_svg;
use forge_bench::{run_bench, BenchConfig, BenchRecord, Class, Sizes, SolverKind, ALL_CLASSES};
use forge_core::{solve, Settings};

fn smallest_sweep(out: Option<std::path::PathBuf>) -> BenchConfig {
    BenchConfig { instances: 3, repeats: 2, out_dir: out, ..BenchConfig::default() }
}

#[test]
fn smallest_sizes_give_fifteen_optimal_records() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_bench(&smallest_sweep(Some(dir.path().to_path_buf()))).unwrap();
    assert_eq!(report.records.len(), 15);
    assert!(report.records.iter().all(|r| r.solved() && r.runtime_s > 0.0), "{:?}", report.records);
    for c in ALL_CLASSES {
        assert_eq!(report.records.iter().filter(|r| r.class == c.name()).count(), 3);
    }
    // One row per class and solver; one solver, so every row normalizes to 1.
    assert_eq!(report.sgm.len(), 5);
    assert!(report.sgm.iter().all(|r| r.solver == "library" && r.normalized == 1.0));
    for f in ["records.csv", "sgm.csv", "profiles.svg"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    let csv = std::fs::read_to_string(dir.path().join("records.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "problem,class,size,solver,status,runtime_s,iterations");
    assert_eq!(csv.lines().count(), 16);
}

#[test]
fn sweeps_repeat_iteration_counts() {
    let a = run_bench(&smallest_sweep(None)).unwrap();
    let strict = BenchConfig { timing_strict: true, ..smallest_sweep(None) };
    let b = run_bench(&strict).unwrap();
    let key = |r: &Vec<BenchRecord>| r.iter().map(|x| (x.problem.clone(), x.iterations, x.size)).collect::<Vec<_>>();
    assert_eq!(key(&a.records), key(&b.records));
}

fn rec(problem: &str, solver: &str, status: &str, t: f64) -> BenchRecord {
    BenchRecord {
        problem: problem.into(),
        class: "rkf".into(),
        size: 1,
        solver: solver.into(),
        status: status.into(),
        runtime_s: t,
        iterations: 5,
    }
}

#[test]
fn sgm_table_charges_failures_the_class_cap() {
    let records = vec![
        rec("p0", "a", "optimal", 1.0),
        rec("p1", "a", "max_iters", 0.01),
        rec("p0", "b", "optimal", 2.0),
        rec("p1", "b", "optimal", 2.0),
    ];
    let rows = sgm_table(&records);
    assert_eq!(rows.len(), 2);
    let a = rows.iter().find(|r| r.solver == "a").unwrap();
    let b = rows.iter().find(|r| r.solver == "b").unwrap();
    assert!((a.sgm - ((2.0f64 * 11.0).sqrt() - 1.0)).abs() < 1e-12);
    assert!((b.sgm - 2.0).abs() < 1e-12);
    assert_eq!(b.normalized, 1.0);
    assert!((a.normalized - a.sgm / 2.0).abs() < 1e-12);

    let (solvers, prof) = profiles(&records);
    let prof = prof.unwrap();
    assert_eq!(solvers, ["a", "b"]);
    assert_eq!(prof.relative[0].terminal(), 0.5);
    assert_eq!(prof.relative[1].terminal(), 1.0);
    let svg = profiles_svg(&solvers, &prof);
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<polyline").count(), 4);
}

#[test]
fn option_strings_parse() {
    assert_eq!("small".parse::<Sizes>().unwrap(), Sizes::First(1));
    assert_eq!("3".parse::<Sizes>().unwrap().of(Class::Lasso), &[1, 2, 3]);
    assert_eq!("all".parse::<Sizes>().unwrap().of(Class::Rkf).len(), 10);
    assert!("big".parse::<Sizes>().is_err());
    assert_eq!("generated".parse::<SolverKind>().unwrap(), SolverKind::Generated);
    assert!("gurobi".parse::<SolverKind>().is_err());
}

#[test]
fn runtest_output_parses() {
    let r =
        parse_runtest("status: Optimal\niterations: 7\nobjective: -1.5000000000e+00\nsolve_time_s: 2.5e-5\n").unwrap();
    assert_eq!((r.status.as_str(), r.iterations, r.objective, r.solve_time), ("Optimal", 7, -1.5, 2.5e-5));
    assert!(parse_runtest("status: Optimal\n").is_err());
}

#[test]
fn generated_solver_reproduces_the_library_on_a_bench_instance() {
    let dir = tempfile::tempdir().unwrap();
    let prob = Class::Oscmass.generate(8, 4);
    let lib = solve(&prob, &Settings::default());
    let run = run_generated(&prob, "osc_probe", dir.path(), 3).unwrap();
    assert_eq!(run.status, "Optimal");
    assert_eq!(run.iterations, lib.iterations);
    assert!((run.objective - lib.primal_obj).abs() <= 1e-9 * (1.0 + lib.primal_obj.abs()));
    assert!(run.solve_time > 0.0);
}
