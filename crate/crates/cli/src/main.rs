use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use forge_bench::{run_bench, BenchConfig, Class, Sizes, SolverKind};
use forge_codegen::{emit, plan, EmitOptions, GenSpec};
use forge_core::qsf::parse_problem;
use forge_core::{Ordering, Settings, Solver, Status};

#[derive(Parser)]
#[command(name = "forge", version, about = "Interior-point solver for quadratic second-order cone programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a QSF-JSON problem file with the library solver.
    Solve(SolveArgs),
    /// Emit a standalone solver crate for a problem's sparsity pattern.
    Codegen(CodegenArgs),
    /// Run the benchmark sweep and write its reports.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    #[arg(long)]
    abstol: Option<f64>,
    #[arg(long)]
    reltol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Factor the KKT system in its natural order instead of AMD.
    #[arg(long)]
    natural_order: bool,
    /// Also print the primal solution, one entry per line.
    #[arg(long)]
    print_x: bool,
}

#[derive(Args)]
struct CodegenArgs {
    file: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Package name; defaults to the file stem.
    #[arg(long)]
    name: Option<String>,
    /// Leave out the `runtest` binary.
    #[arg(long)]
    no_test_runner: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "rkf,lcvx,lasso,portfolio,oscmass")]
    classes: Vec<Class>,
    /// `small`, `all`, or how many of each class's sizes to run.
    #[arg(long, default_value = "small")]
    sizes: Sizes,
    #[arg(long, default_value_t = 20)]
    instances: usize,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[arg(long, value_delimiter = ',', default_value = "library")]
    solvers: Vec<SolverKind>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Solve one instance at a time.
    #[arg(long)]
    timing_strict: bool,
    /// LQR horizons for the sparse versus unrolled factorization study.
    #[arg(long, value_delimiter = ',')]
    ldl_horizons: Vec<usize>,
}

fn read_problem(file: &PathBuf) -> Result<forge_core::ProblemData> {
    let bytes = std::fs::read(file).with_context(|| format!("reading {}", file.display()))?;
    parse_problem(&bytes).with_context(|| format!("loading {}", file.display()))
}

fn run_solve(a: SolveArgs) -> Result<ExitCode> {
    let prob = read_problem(&a.file)?;
    let mut settings = Settings::default();
    settings.eps_abs = a.abstol.unwrap_or(settings.eps_abs);
    settings.eps_rel = a.reltol.unwrap_or(settings.eps_rel);
    settings.max_iters = a.max_iters.unwrap_or(settings.max_iters);
    let ordering = if a.natural_order { Ordering::Natural } else { Ordering::Amd };
    let sol = Solver::with_ordering(prob, settings, ordering)?.solve();
    println!("status: {}", sol.status.as_str());
    println!("iterations: {}", sol.iterations);
    println!("objective: {:.10e}", sol.primal_obj);
    println!("dual objective: {:.10e}", sol.dual_obj);
    println!("primal residual: {:.3e}", sol.primal_res);
    println!("dual residual: {:.3e}", sol.dual_res);
    println!("gap: {:.3e}", sol.gap);
    println!("setup_time_s: {:e}", sol.setup_time);
    println!("solve_time_s: {:e}", sol.solve_time);
    if a.print_x {
        for v in &sol.x {
            println!("{v:.17e}");
        }
    }
    Ok(if sol.status == Status::Optimal { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn run_codegen(a: CodegenArgs) -> Result<ExitCode> {
    let problem = read_problem(&a.file)?;
    let name = match a.name {
        Some(n) => n,
        None => a.file.file_stem().and_then(|s| s.to_str()).unwrap_or("custom_solver").replace(['-', '.', ' '], "_"),
    };
    if !name.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
        bail!("package name `{name}` must start with a letter; pass --name");
    }
    let options = EmitOptions { crate_name: name, test_runner: !a.no_test_runner, ..EmitOptions::default() };
    let report = emit(&plan(&GenSpec { problem, out_dir: a.out.clone(), options })?)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!("wrote {} files to {} ({} kernel operations)", report.files.len(), a.out.display(), report.op_count);
    Ok(ExitCode::SUCCESS)
}

fn run_bench_cmd(a: BenchArgs) -> Result<ExitCode> {
    let cfg = BenchConfig {
        classes: a.classes,
        sizes: a.sizes,
        instances: a.instances,
        repeats: a.repeats,
        solvers: a.solvers,
        seed: a.seed,
        settings: Settings::default(),
        timing_strict: a.timing_strict,
        ldl_horizons: a.ldl_horizons,
        out_dir: Some(a.out.clone()),
    };
    let report = run_bench(&cfg)?;
    let solved = report.records.iter().filter(|r| r.solved()).count();
    println!("{solved} of {} solves optimal", report.records.len());
    println!("{:<10} {:<10} {:>12} {:>10}", "class", "solver", "sgm_s", "relative");
    for r in &report.sgm {
        println!("{:<10} {:<10} {:>12.4e} {:>10.2}", r.class, r.solver, r.sgm, r.normalized);
    }
    for r in &report.ldl {
        println!(
            "ldl T={:<4} n={:<5} nnz(L)={:<6} sparse {:.3e}s unrolled {:.3e}s ratio {:.2}",
            r.horizon, r.dimension, r.nnz_l, r.sparse_s, r.unrolled_s, r.ratio
        );
    }
    println!("reports in {}", a.out.display());
    Ok(ExitCode::SUCCESS)
}

fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Solve(a) => run_solve(a),
        Command::Codegen(a) => run_codegen(a),
        Command::Bench(a) => run_bench_cmd(a),
    }
}
