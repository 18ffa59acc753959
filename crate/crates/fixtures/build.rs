//! Emits the toy solver, one solver per benchmark class at its smallest
//! size, and unrolled LQR factorizations into `OUT_DIR`, plus `mods.rs`
//! which mounts each of them as a module of this crate.

use std::fmt::Write as _;
use std::path::Path;

use forge_bench::ldl_compare::prepare;
use forge_bench::problems::lqr_kkt;
use forge_bench::ALL_CLASSES;
use forge_codegen::emit::render_ldl_module;
use forge_codegen::{emit, plan, EmitOptions, GenSpec};
use forge_core::ProblemData;

#[path = "src/cases.rs"]
#[allow(dead_code)]
mod cases;

fn emit_solver(out: &Path, name: &str, problem: ProblemData, mods: &mut String) {
    let dir = out.join(name);
    let spec = GenSpec {
        problem,
        out_dir: dir.clone(),
        options: EmitOptions { crate_name: name.into(), test_runner: false, ..EmitOptions::default() },
    };
    emit(&plan(&spec).expect("fixture problems are valid")).expect("OUT_DIR is writable");
    let _ = writeln!(mods, "#[path = {:?}]\npub mod {name};", dir.join("src/lib.rs"));
}

fn main() {
    println!("cargo:rerun-if-changed=build.rs");
    println!("cargo:rerun-if-changed=src/cases.rs");
    let out = std::path::PathBuf::from(std::env::var_os("OUT_DIR").unwrap());
    let mut mods = String::new();
    emit_solver(&out, "toy", cases::toy_problem(), &mut mods);
    for class in ALL_CLASSES {
        emit_solver(&out, class.name(), class.generate(class.smallest(), cases::CLASS_SEED), &mut mods);
    }
    for t in cases::LQR_HORIZONS {
        let prep = prepare(&lqr_kkt(t, cases::LQR_SEED));
        let path = out.join(format!("ldl_t{t}.rs"));
        std::fs::write(&path, render_ldl_module(&prep.sym, &prep.signs, 2000)).unwrap();
        let _ = writeln!(mods, "#[path = {path:?}]\npub mod ldl_t{t};");
    }
    std::fs::write(out.join("mods.rs"), mods).unwrap();
}
