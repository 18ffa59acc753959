//! Rendering of a [`GenPlan`] as a standalone Rust crate.
//!
//! Layout of the emitted crate:
//!
//! ```text
//! Cargo.toml
//! src/lib.rs        public entry points
//! src/cone.rs       cone operations        (runtime, verbatim)
//! src/solver.rs     interior-point driver  (runtime, verbatim)
//! src/utils.rs      vector helpers         (runtime, verbatim)
//! src/kernels.rs    unrolled spmv, KKT and LDL kernels
//! src/workspace.rs  dimensions, default data and the static workspace
//! src/runtest.rs    optional runner: load defaults, solve, report
//! ```
//!
//! `kernels.rs` is a function of the pattern alone; all data values live in
//! `workspace.rs`.

use std::fmt::{Debug, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use forge_core::kkt::{KktLayout, SlotSource};
use forge_core::runtime::SOURCES;
use forge_core::sparse::SymbolicFactor;
use thiserror::Error;

use crate::ir::{Arr, KernelProgram};
use crate::unroll::{unroll_ldl, unroll_ldl_solve};
use crate::GenPlan;

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmitReport {
    pub files: Vec<PathBuf>,
    pub op_count: usize,
    pub warnings: Vec<String>,
}

/// Writes the crate for `plan` into `plan.spec.out_dir`.
pub fn emit(plan: &GenPlan) -> Result<EmitReport, EmitError> {
    let root = &plan.spec.out_dir;
    let mut files = Vec::new();
    for (rel, text) in render_files(plan) {
        let path = root.join(&rel);
        let io = |source| EmitError::Io { path: path.clone(), source };
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(io)?;
        }
        fs::write(&path, text).map_err(io)?;
        files.push(path);
    }
    let op_count = plan.kernels.op_count();
    let mut warnings = Vec::new();
    if op_count > plan.spec.options.op_budget {
        warnings.push(format!(
            "kernels contain {op_count} scalar operations (budget {}); expect long compile times",
            plan.spec.options.op_budget
        ));
    }
    Ok(EmitReport { files, op_count, warnings })
}

/// Relative path and contents of every emitted file.
pub fn render_files(plan: &GenPlan) -> Vec<(PathBuf, String)> {
    let opts = &plan.spec.options;
    let mut files = vec![
        (PathBuf::from("Cargo.toml"), manifest(&opts.crate_name, opts.test_runner)),
        (PathBuf::from("src/lib.rs"), lib_rs(plan)),
        (PathBuf::from("src/kernels.rs"), kernels_rs(plan)),
        (PathBuf::from("src/workspace.rs"), workspace_rs(plan)),
    ];
    for (name, text) in SOURCES {
        files.push((Path::new("src").join(name), text.to_string()));
    }
    if opts.test_runner {
        files.push((PathBuf::from("src/runtest.rs"), runtest_rs(&opts.crate_name)));
    }
    files
}

fn manifest(name: &str, runner: bool) -> String {
    let mut s = format!(
        "[package]\nname = \"{name}\"\nversion = \"0.1.0\"\nedition = \"2021\"\n\n[lib]\npath = \"src/lib.rs\"\n"
    );
    if runner {
        s.push_str("\n[[bin]]\nname = \"runtest\"\npath = \"src/runtest.rs\"\n");
    }
    // An empty workspace table keeps the crate buildable when it is emitted
    // inside another workspace's directory tree.
    s.push_str("\n[profile.release]\ncodegen-units = 1\n\n[workspace]\n");
    s
}

fn lib_rs(plan: &GenPlan) -> String {
    let l = &plan.layout;
    let k = &plan.kernels;
    format!(
        r#"//! Solver generated for a fixed sparsity pattern.
//!
//! Dimensions: n = {n}, p = {p}, m = {m} (orthant {lo}, second-order cones {q:?}).
//! KKT: {nk} rows, {kn} stored entries, {ln} entries in L.
//! Kernel operations: factor {fo} ({fm} multiplies), solve {so}, total {total}.
//!
//! Typical use: `set_default_settings`, `load_data`, optionally `update_*`,
//! then `solve`. Nothing here allocates.
#![allow(dead_code, non_snake_case, clippy::all)]

mod cone;
mod kernels;
mod solver;
mod utils;
mod workspace;

pub use solver::{{Info, Settings, Status}};
pub use workspace::*;

/// Resets the settings to the library defaults.
pub fn set_default_settings(ws: &mut Workspace) {{
    ws.settings = Settings::new();
}}

/// Loads the data the solver was generated with.
pub fn load_data(ws: &mut Workspace) {{
    ws.data = Data::defaults();
}}

/// New values for the entries of the upper triangle of `P`, in pattern
/// order.
pub fn update_P(ws: &mut Workspace, vals: &[f64; P_NNZ]) {{
    ws.data.p = *vals;
}}

/// New values for the entries of `A`, in column-major pattern order.
pub fn update_A(ws: &mut Workspace, vals: &[f64; A_NNZ]) {{
    ws.data.a = *vals;
}}

/// New values for the entries of `G`, in column-major pattern order.
pub fn update_G(ws: &mut Workspace, vals: &[f64; G_NNZ]) {{
    ws.data.g = *vals;
}}

pub fn update_c(ws: &mut Workspace, vals: &[f64; N]) {{
    ws.data.c = *vals;
}}

pub fn update_b(ws: &mut Workspace, vals: &[f64; P]) {{
    ws.data.b = *vals;
}}

pub fn update_h(ws: &mut Workspace, vals: &[f64; M]) {{
    ws.data.h = *vals;
}}

/// Runs the interior-point method on the current data. Details of the run
/// are left in `ws.info`, the iterate in `ws.x()`, `ws.s()`, `ws.y()`,
/// `ws.z()`.
pub fn solve(ws: &mut Workspace) -> Status {{
    ws.solve()
}}
"#,
        n = l.n,
        p = l.p,
        m = l.m,
        lo = l.l,
        q = l.q,
        nk = l.dim(),
        kn = l.nnz_kkt(),
        ln = l.sym.nnz_l(),
        fo = k.ldl_factor.len(),
        fm = k.ldl_factor.mac_count(),
        so = k.ldl_solve.len(),
        total = k.op_count(),
    )
}

fn runtest_rs(crate_name: &str) -> String {
    let lib = crate_name.replace('-', "_");
    format!(
        r#"//! Loads the default data, solves, and reports. An optional argument
//! repeats the solve that many times and reports the fastest run.

use std::time::Instant;

use {lib}::{{load_data, set_default_settings, solve, Status, Workspace}};

fn main() {{
    let repeats: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1).max(1);
    let mut ws = Workspace::new();
    set_default_settings(&mut ws);
    let mut best = f64::INFINITY;
    let mut status = Status::Unsolved;
    for _ in 0..repeats {{
        load_data(&mut ws);
        let t0 = Instant::now();
        status = solve(&mut ws);
        best = best.min(t0.elapsed().as_secs_f64());
    }}
    println!("status: {{status:?}}");
    println!("iterations: {{}}", ws.info.iters);
    println!("objective: {{:+.10e}}", ws.info.pobj);
    println!("solve_time_s: {{best:.9e}}");
    std::process::exit(if status == Status::Optimal {{ 0 }} else {{ 1 }});
}}
"#
    )
}

/// `[a, b, c]` wrapped at eight entries per line.
fn table<T: Debug>(vals: &[T]) -> String {
    if vals.is_empty() {
        return "[]".into();
    }
    let mut s = String::from("[\n");
    for row in vals.chunks(8) {
        s.push_str("   ");
        for v in row {
            let _ = write!(s, " {v:?},");
        }
        s.push('\n');
    }
    s.push(']');
    s
}

fn workspace_rs(plan: &GenPlan) -> String {
    let prob = &plan.spec.problem;
    let l = &plan.layout;
    let mut s = String::from(
        "//! Problem dimensions, default data and the statically sized workspace.\n\n\
         use super::kernels;\n\
         use super::solver::{self, Info, KktBackend, Settings, Status, Work};\n\n",
    );
    let consts: [(&str, usize); 13] = [
        ("N", l.n),
        ("P", l.p),
        ("M", l.m),
        ("L", l.l),
        ("NSOC", l.q.len()),
        ("NK", l.dim()),
        ("P_NNZ", prob.P.nnz()),
        ("A_NNZ", prob.A.nnz()),
        ("G_NNZ", prob.G.nnz()),
        ("KKT_NNZ", l.nnz_kkt()),
        ("L_NNZ", l.sym.nnz_l()),
        ("X_OFF", 0),
        ("S_OFF", l.n),
    ];
    for (name, v) in consts {
        let _ = writeln!(s, "pub const {name}: usize = {v};");
    }
    s.push_str("pub const Y_OFF: usize = N + M;\npub const Z_OFF: usize = N + M + P;\n");
    s.push_str("pub const WORK_LEN: usize = Work::<'static>::len(N, P, M, NSOC);\n\n");
    let _ = writeln!(s, "pub const Q: [usize; NSOC] = {};", table(&l.q));
    s.push_str("/// Fill-reducing ordering of the KKT matrix, fixed at generation time.\n");
    let _ = writeln!(s, "pub const PERM: [usize; NK] = {};", table(&l.sym.perm.perm));
    let _ = writeln!(s, "pub const SIGNS: [f64; NK] = {};\n", table(&l.signs));
    for (name, len, vals) in [
        ("P_DEFAULT", "P_NNZ", &prob.P.vals),
        ("A_DEFAULT", "A_NNZ", &prob.A.vals),
        ("G_DEFAULT", "G_NNZ", &prob.G.vals),
        ("C_DEFAULT", "N", &prob.c),
        ("B_DEFAULT", "P", &prob.b),
        ("H_DEFAULT", "M", &prob.h),
    ] {
        let _ = writeln!(s, "pub const {name}: [f64; {len}] = {};", table(vals));
    }
    s.push_str(WORKSPACE_BODY);
    s
}

const WORKSPACE_BODY: &str = r#"
/// Problem values. `p` holds the upper triangle of `P`; `p`, `a` and `g`
/// follow the column-major pattern order the solver was generated for.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Data {
    pub p: [f64; P_NNZ],
    pub a: [f64; A_NNZ],
    pub g: [f64; G_NNZ],
    pub c: [f64; N],
    pub b: [f64; P],
    pub h: [f64; M],
}

impl Data {
    pub const fn defaults() -> Data {
        Data { p: P_DEFAULT, a: A_DEFAULT, g: G_DEFAULT, c: C_DEFAULT, b: B_DEFAULT, h: H_DEFAULT }
    }
}

struct Kkt {
    kx: [f64; KKT_NNZ],
    lx: [f64; L_NNZ],
    d: [f64; NK],
    dinv: [f64; NK],
    y: [f64; NK],
}

/// All solver state. Holds the default data and settings when created.
pub struct Workspace {
    pub settings: Settings,
    pub info: Info,
    pub data: Data,
    kkt: Kkt,
    work: [f64; WORK_LEN],
}

struct Backend<'a> {
    data: &'a Data,
    kkt: &'a mut Kkt,
}

impl KktBackend for Backend<'_> {
    fn n(&self) -> usize {
        N
    }
    fn p(&self) -> usize {
        P
    }
    fn m(&self) -> usize {
        M
    }
    fn l(&self) -> usize {
        L
    }
    fn q(&self) -> &[usize] {
        &Q
    }
    fn c(&self) -> &[f64] {
        &self.data.c
    }
    fn b(&self) -> &[f64] {
        &self.data.b
    }
    fn h(&self) -> &[f64] {
        &self.data.h
    }
    fn p_mul(&self, x: &[f64], y: &mut [f64]) {
        kernels::p_mul(&self.data.p, x, y);
    }
    fn a_mul(&self, x: &[f64], y: &mut [f64]) {
        kernels::a_mul(&self.data.a, x, y);
    }
    fn at_mul(&self, y: &[f64], x: &mut [f64]) {
        kernels::at_mul(&self.data.a, y, x);
    }
    fn g_mul(&self, x: &[f64], y: &mut [f64]) {
        kernels::g_mul(&self.data.g, x, y);
    }
    fn gt_mul(&self, y: &[f64], x: &mut [f64]) {
        kernels::gt_mul(&self.data.g, y, x);
    }
    fn set_nt_identity(&mut self, eps_s: f64) {
        kernels::load_kkt(&mut self.kkt.kx, &self.data.p, &self.data.a, &self.data.g, eps_s);
        kernels::set_nt_identity(&mut self.kkt.kx, eps_s);
    }
    fn set_nt(&mut self, w: &[f64], eta: &[f64], eps_s: f64) {
        kernels::set_nt(&mut self.kkt.kx, w, eta, eps_s);
    }
    fn factor(&mut self, eps_d: f64) -> Option<usize> {
        let k = &mut *self.kkt;
        kernels::ldl_factor(&k.kx, &mut k.lx, &mut k.d, &mut k.dinv, &mut k.y, eps_d)
    }
    fn perm(&self) -> &[usize] {
        &PERM
    }
    fn kkt_signs(&self) -> &[f64] {
        &SIGNS
    }
    fn kkt_mul(&self, x: &[f64], y: &mut [f64]) {
        kernels::kkt_mul(&self.kkt.kx, x, y);
    }
    fn ldl_solve(&self, x: &mut [f64]) {
        kernels::ldl_solve(&self.kkt.lx, &self.kkt.dinv, x);
    }
}

impl Workspace {
    pub const fn new() -> Workspace {
        Workspace {
            settings: Settings::new(),
            info: Info::new(),
            data: Data::defaults(),
            kkt: Kkt { kx: [0.0; KKT_NNZ], lx: [0.0; L_NNZ], d: [0.0; NK], dinv: [0.0; NK], y: [0.0; NK] },
            work: [0.0; WORK_LEN],
        }
    }

    pub fn solve(&mut self) -> Status {
        let mut bk = Backend { data: &self.data, kkt: &mut self.kkt };
        let mut w = Work::split(&mut self.work, N, P, M, NSOC);
        solver::solve(&mut bk, &mut w, &self.settings, &mut self.info);
        self.info.status
    }

    pub fn x(&self) -> &[f64] {
        &self.work[X_OFF..X_OFF + N]
    }
    pub fn s(&self) -> &[f64] {
        &self.work[S_OFF..S_OFF + M]
    }
    pub fn y(&self) -> &[f64] {
        &self.work[Y_OFF..Y_OFF + P]
    }
    pub fn z(&self) -> &[f64] {
        &self.work[Z_OFF..Z_OFF + M]
    }
}
"#;

/// Renders `stmts` as one or more functions with parameter list `params`,
/// split every `chunk` statements, and returns the calls that run them in
/// order. Factor parts also take `eps` and return their pivot count.
fn parts(
    out: &mut String,
    name: &str,
    params: &str,
    args: &str,
    stmts: &[String],
    chunk: usize,
    factor: bool,
) -> String {
    let mut calls = String::new();
    let groups: Vec<&[String]> = if stmts.is_empty() { vec![&[]] } else { stmts.chunks(chunk.max(1)).collect() };
    for (i, group) in groups.iter().enumerate() {
        if factor {
            let _ = writeln!(out, "fn {name}_{i}({params}, eps: f64) -> Option<usize> {{\n    let mut nreg = 0;");
        } else {
            let _ = writeln!(out, "fn {name}_{i}({params}) {{");
        }
        for st in group.iter() {
            let _ = writeln!(out, "    {st}");
        }
        if factor {
            out.push_str("    Some(nreg)\n");
        }
        out.push_str("}\n\n");
        if factor {
            let _ = writeln!(calls, "    nreg += {name}_{i}({args}, eps)?;");
        } else {
            let _ = writeln!(calls, "    {name}_{i}({args});");
        }
    }
    calls
}

fn spmv_names(a: Arr) -> &'static str {
    match a {
        Arr::X => "x",
        Arr::Y => "y",
        Arr::Vals => "v",
        _ => unreachable!("spmv kernels only touch x, y and v"),
    }
}

fn factor_names(a: Arr) -> &'static str {
    match a {
        Arr::Vals => "kx",
        Arr::Lx => "lx",
        Arr::D => "d",
        Arr::Dinv => "dinv",
        Arr::Scratch => "y",
        _ => unreachable!("the factor kernel reads kx and writes L, D"),
    }
}

fn solve_names(a: Arr) -> &'static str {
    match a {
        Arr::Y => "x",
        Arr::Lx => "lx",
        Arr::Dinv => "dinv",
        _ => unreachable!("the solve kernel reads L, D and updates x"),
    }
}

fn spmv_fn(out: &mut String, name: &str, prog: &KernelProgram, nnz: &str, xn: &str, yn: &str, chunk: usize) {
    let stmts = prog.render(&spmv_names);
    let params = format!("v: &[f64; {nnz}], x: &[f64; {xn}], y: &mut [f64; {yn}]");
    let calls = parts(out, name, &params, "v, x, y", &stmts, chunk, false);
    let _ = write!(
        out,
        "pub fn {name}(v: &[f64; {nnz}], x: &[f64], y: &mut [f64]) {{\n    \
         let x: &[f64; {xn}] = x.try_into().unwrap();\n    \
         let y: &mut [f64; {yn}] = y.try_into().unwrap();\n{calls}}}\n\n"
    );
}

/// Factor and solve kernels; expects `NK`, `KKT_NNZ` and `L_NNZ` in scope.
fn ldl_fns(out: &mut String, factor: &KernelProgram, solve: &KernelProgram, chunk: usize) {
    let fparams =
        "kx: &[f64; KKT_NNZ], lx: &mut [f64; L_NNZ], d: &mut [f64; NK], dinv: &mut [f64; NK], y: &mut [f64; NK]";
    let calls = parts(out, "ldl_factor", fparams, "kx, lx, d, dinv, y", &factor.render(&factor_names), chunk, true);
    let _ = write!(
        out,
        "/// `L D L^T` factorization of the permuted KKT values `kx` with dynamic\n\
         /// regularization `eps`. Returns the number of wrong-sign pivots, or\n\
         /// `None` on a non-finite pivot.\n\
         pub fn ldl_factor({fparams}, eps: f64) -> Option<usize> {{\n    let mut nreg = 0;\n{calls}    Some(nreg)\n}}\n\n"
    );
    let sparams = "lx: &[f64; L_NNZ], dinv: &[f64; NK], x: &mut [f64; NK]";
    let calls = parts(out, "ldl_solve", sparams, "lx, dinv, x", &solve.render(&solve_names), chunk, false);
    let _ = write!(
        out,
        "/// Solves `L D L^T x = b` in place, in permuted order.\n\
         pub fn ldl_solve(lx: &[f64; L_NNZ], dinv: &[f64; NK], x: &mut [f64]) {{\n    \
         let x: &mut [f64; NK] = x.try_into().unwrap();\n{calls}}}\n\n"
    );
}

const KERNEL_ALLOWS: &str = "#![allow(unused_variables, unused_mut, clippy::all)]\n\n";

fn kkt_slot_fns(out: &mut String, layout: &KktLayout, chunk: usize) {
    let mut load = Vec::new();
    let mut ident = Vec::new();
    let mut nt = Vec::new();
    for (s, src) in layout.sources.iter().enumerate() {
        match *src {
            SlotSource::PDiag(Some(k)) => load.push(format!("kx[{s}] = p[{k}] + eps;")),
            SlotSource::PDiag(None) => load.push(format!("kx[{s}] = eps;")),
            SlotSource::P(k) => load.push(format!("kx[{s}] = p[{k}];")),
            SlotSource::A(k) => load.push(format!("kx[{s}] = a[{k}];")),
            SlotSource::G(k) => load.push(format!("kx[{s}] = g[{k}];")),
            SlotSource::EqDiag => load.push(format!("kx[{s}] = -eps;")),
            SlotSource::Orthant(j) => {
                ident.push(format!("kx[{s}] = -1.0 - eps;"));
                nt.push(format!("kx[{s}] = -(w[{j}] * w[{j}]) - eps;"));
            }
            SlotSource::Soc { cone, off, r, c, .. } => {
                let (wr, wc) = (off + r, off + c);
                // Same expression tree as `cone::soc_wtw`: subtracting the
                // zero off-diagonal of J is exact and is left out.
                let inner = if r != c {
                    format!("2.0 * w[{wr}] * w[{wc}]")
                } else if r == 0 {
                    format!("2.0 * w[{wr}] * w[{wc}] - 1.0")
                } else {
                    format!("2.0 * w[{wr}] * w[{wc}] + 1.0")
                };
                let v = format!("-(eta[{cone}] * eta[{cone}] * ({inner}))");
                if r == c {
                    ident.push(format!("kx[{s}] = -1.0 - eps;"));
                    nt.push(format!("kx[{s}] = {v} - eps;"));
                } else {
                    ident.push(format!("kx[{s}] = 0.0;"));
                    nt.push(format!("kx[{s}] = {v};"));
                }
            }
        }
    }
    let lparams = "kx: &mut [f64; KKT_NNZ], p: &[f64; P_NNZ], a: &[f64; A_NNZ], g: &[f64; G_NNZ], eps: f64";
    let calls = parts(out, "load_kkt", lparams, "kx, p, a, g, eps", &load, chunk, false);
    let _ = write!(out, "/// Writes the data entries of the KKT matrix.\npub fn load_kkt({lparams}) {{\n{calls}}}\n\n");
    let iparams = "kx: &mut [f64; KKT_NNZ], eps: f64";
    let calls = parts(out, "set_nt_identity", iparams, "kx, eps", &ident, chunk, false);
    let _ = write!(out, "pub fn set_nt_identity({iparams}) {{\n{calls}}}\n\n");
    let nparams = "kx: &mut [f64; KKT_NNZ], w: &[f64; M], eta: &[f64; NSOC], eps: f64";
    let calls = parts(out, "set_nt", nparams, "kx, w, eta, eps", &nt, chunk, false);
    let _ = write!(
        out,
        "/// Writes `-W^T W - eps I` into the scaling block.\n\
         pub fn set_nt(kx: &mut [f64; KKT_NNZ], w: &[f64], eta: &[f64], eps: f64) {{\n    \
         let w: &[f64; M] = w.try_into().unwrap();\n    \
         let eta: &[f64; NSOC] = eta.try_into().unwrap();\n{calls}}}\n\n"
    );
}

fn kernels_rs(plan: &GenPlan) -> String {
    let k = &plan.kernels;
    let chunk = plan.spec.options.chunk;
    let mut s = String::from(
        "//! Unrolled kernels. Every index is a constant; the operation order of\n\
         //! each kernel is that of the corresponding library loop.\n",
    );
    s.push_str(KERNEL_ALLOWS);
    s.push_str("use super::workspace::{A_NNZ, G_NNZ, KKT_NNZ, L_NNZ, M, N, NK, NSOC, P, P_NNZ};\n\n");
    spmv_fn(&mut s, "p_mul", &k.p_mul, "P_NNZ", "N", "N", chunk);
    spmv_fn(&mut s, "a_mul", &k.a_mul, "A_NNZ", "N", "P", chunk);
    spmv_fn(&mut s, "at_mul", &k.at_mul, "A_NNZ", "P", "N", chunk);
    spmv_fn(&mut s, "g_mul", &k.g_mul, "G_NNZ", "N", "M", chunk);
    spmv_fn(&mut s, "gt_mul", &k.gt_mul, "G_NNZ", "M", "N", chunk);
    spmv_fn(&mut s, "kkt_mul", &k.kkt_mul, "KKT_NNZ", "NK", "NK", chunk);
    kkt_slot_fns(&mut s, &plan.layout, chunk);
    ldl_fns(&mut s, &k.ldl_factor, &k.ldl_solve, chunk);
    s
}

/// A self-contained module with the unrolled factor and solve kernels for
/// one symbolic factorization, for use outside a full solver.
pub fn render_ldl_module(sym: &SymbolicFactor, signs: &[f64], chunk: usize) -> String {
    let factor = unroll_ldl(sym, signs);
    let solve = unroll_ldl_solve(sym);
    let mut s = format!(
        "//! Unrolled `L D L^T` kernels: {} columns, {} entries in L, {} factor operations.\n",
        sym.n,
        sym.nnz_l(),
        factor.len()
    );
    s.push_str(KERNEL_ALLOWS);
    let _ = writeln!(s, "pub const NK: usize = {};", sym.n);
    let _ = writeln!(s, "pub const KKT_NNZ: usize = {};", sym.kperm.nnz());
    let _ = writeln!(s, "pub const L_NNZ: usize = {};", sym.nnz_l());
    let _ = writeln!(s, "pub const FACTOR_OPS: usize = {};", factor.len());
    let _ = writeln!(s, "pub const FACTOR_MULS: usize = {};\n", factor.mac_count());
    ldl_fns(&mut s, &factor, &solve, chunk);
    s
}
