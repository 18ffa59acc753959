//! Library interior-point solver backed by sparse LDL.

use std::time::Instant;

use crate::kkt::{KktLayout, Ordering};
use crate::problem::{csc_mul, csc_mul_t, sym_mul};
use crate::problem::{ProblemData, ProblemError, Settings, Solution, Status};
use crate::runtime::solver::{self, Info, KktBackend, Work};
use crate::sparse::LdlFactors;

/// Mutable numeric state of the permuted KKT matrix.
#[derive(Debug, Clone)]
pub struct KktValues {
    pub kx: Vec<f64>,
    pub factors: LdlFactors,
}

/// [`KktBackend`] over CSC data and the generic sparse factorization.
pub struct SparseBackend<'a> {
    pub prob: &'a ProblemData,
    pub layout: &'a KktLayout,
    pub vals: &'a mut KktValues,
}

impl<'a> SparseBackend<'a> {
    /// Writes the data slots of the KKT matrix from the problem values.
    pub fn load_kkt(&mut self, eps_s: f64) {
        for &slot in &self.layout.data_slots {
            self.vals.kx[slot] = self.layout.sources[slot].data_value(self.prob, eps_s);
        }
    }
}

impl<'a> KktBackend for SparseBackend<'a> {
    fn n(&self) -> usize {
        self.layout.n
    }
    fn p(&self) -> usize {
        self.layout.p
    }
    fn m(&self) -> usize {
        self.layout.m
    }
    fn l(&self) -> usize {
        self.layout.l
    }
    fn q(&self) -> &[usize] {
        &self.layout.q
    }
    fn c(&self) -> &[f64] {
        &self.prob.c
    }
    fn b(&self) -> &[f64] {
        &self.prob.b
    }
    fn h(&self) -> &[f64] {
        &self.prob.h
    }
    fn p_mul(&self, x: &[f64], y: &mut [f64]) {
        let pm = &self.prob.P;
        sym_mul(&pm.colptr, &pm.rowidx, &pm.vals, x, y);
    }
    fn a_mul(&self, x: &[f64], y: &mut [f64]) {
        let a = &self.prob.A;
        csc_mul(&a.colptr, &a.rowidx, &a.vals, x, y);
    }
    fn at_mul(&self, y: &[f64], x: &mut [f64]) {
        let a = &self.prob.A;
        csc_mul_t(&a.colptr, &a.rowidx, &a.vals, y, x);
    }
    fn g_mul(&self, x: &[f64], y: &mut [f64]) {
        let g = &self.prob.G;
        csc_mul(&g.colptr, &g.rowidx, &g.vals, x, y);
    }
    fn gt_mul(&self, y: &[f64], x: &mut [f64]) {
        let g = &self.prob.G;
        csc_mul_t(&g.colptr, &g.rowidx, &g.vals, y, x);
    }
    fn set_nt_identity(&mut self, eps_s: f64) {
        self.load_kkt(eps_s);
        for &slot in &self.layout.nt_slots {
            self.vals.kx[slot] = self.layout.sources[slot].nt_identity_value(eps_s);
        }
    }
    fn set_nt(&mut self, w: &[f64], eta: &[f64], eps_s: f64) {
        for &slot in &self.layout.nt_slots {
            self.vals.kx[slot] = self.layout.sources[slot].nt_value(w, eta, eps_s);
        }
    }
    fn factor(&mut self, eps_d: f64) -> Option<usize> {
        let KktValues { kx, factors } = &mut *self.vals;
        factors.refactor(&self.layout.sym, kx, eps_d).ok()
    }
    fn perm(&self) -> &[usize] {
        &self.layout.sym.perm.perm
    }
    fn kkt_signs(&self) -> &[f64] {
        &self.layout.signs
    }
    fn kkt_mul(&self, x: &[f64], y: &mut [f64]) {
        let k = &self.layout.sym.kperm;
        sym_mul(&k.colptr, &k.rowidx, &self.vals.kx, x, y);
    }
    fn ldl_solve(&self, x: &mut [f64]) {
        self.vals.factors.solve_in_place(&self.layout.sym, x);
    }
}

/// A problem together with its symbolic analysis and workspace. Data values
/// can be replaced between solves without repeating the analysis.
pub struct Solver {
    prob: ProblemData,
    pub settings: Settings,
    layout: KktLayout,
    vals: KktValues,
    work: Vec<f64>,
    setup_time: f64,
}

fn replace(dst: &mut [f64], src: &[f64], name: &str) -> Result<(), ProblemError> {
    if dst.len() != src.len() {
        return Err(ProblemError::DimensionMismatch(name.to_string()));
    }
    if src.iter().any(|v| !v.is_finite()) {
        return Err(ProblemError::NonFinite(name.to_string()));
    }
    dst.copy_from_slice(src);
    Ok(())
}

impl Solver {
    pub fn new(prob: ProblemData, settings: Settings) -> Result<Solver, ProblemError> {
        Solver::with_ordering(prob, settings, Ordering::Amd)
    }

    pub fn with_ordering(prob: ProblemData, settings: Settings, ordering: Ordering) -> Result<Solver, ProblemError> {
        let t0 = Instant::now();
        prob.validate()?;
        let layout = KktLayout::new(&prob, ordering);
        let factors = LdlFactors::new(&layout.sym, layout.signs.clone());
        let vals = KktValues { kx: vec![0.0; layout.nnz_kkt()], factors };
        let work = vec![0.0; Work::len(prob.n, prob.p, prob.m(), prob.cones.nsoc())];
        Ok(Solver { prob, settings, layout, vals, work, setup_time: t0.elapsed().as_secs_f64() })
    }

    pub fn problem(&self) -> &ProblemData {
        &self.prob
    }

    pub fn layout(&self) -> &KktLayout {
        &self.layout
    }

    /// Backend and workspace for driving the iteration step by step.
    pub fn parts(&mut self) -> (SparseBackend<'_>, Work<'_>) {
        let (n, p, m, nsoc) = (self.prob.n, self.prob.p, self.prob.m(), self.prob.cones.nsoc());
        let bk = SparseBackend { prob: &self.prob, layout: &self.layout, vals: &mut self.vals };
        (bk, Work::split(&mut self.work, n, p, m, nsoc))
    }

    pub fn update_p(&mut self, vals: &[f64]) -> Result<(), ProblemError> {
        replace(&mut self.prob.P.vals, vals, "P")
    }
    pub fn update_a(&mut self, vals: &[f64]) -> Result<(), ProblemError> {
        replace(&mut self.prob.A.vals, vals, "A")
    }
    pub fn update_g(&mut self, vals: &[f64]) -> Result<(), ProblemError> {
        replace(&mut self.prob.G.vals, vals, "G")
    }
    pub fn update_c(&mut self, vals: &[f64]) -> Result<(), ProblemError> {
        replace(&mut self.prob.c, vals, "c")
    }
    pub fn update_b(&mut self, vals: &[f64]) -> Result<(), ProblemError> {
        replace(&mut self.prob.b, vals, "b")
    }
    pub fn update_h(&mut self, vals: &[f64]) -> Result<(), ProblemError> {
        replace(&mut self.prob.h, vals, "h")
    }

    pub fn solve(&mut self) -> Solution {
        let t0 = Instant::now();
        let settings = self.settings;
        let setup_time = self.setup_time;
        let mut info = Info::new();
        let (mut bk, mut w) = self.parts();
        solver::solve(&mut bk, &mut w, &settings, &mut info);
        Solution {
            status: info.status,
            x: w.x.to_vec(),
            s: w.s.to_vec(),
            y: w.y.to_vec(),
            z: w.z.to_vec(),
            iterations: info.iters,
            primal_obj: info.pobj,
            dual_obj: info.dobj,
            primal_res: info.pres,
            dual_res: info.dres,
            gap: info.gap,
            nreg: info.nreg,
            setup_time,
            solve_time: t0.elapsed().as_secs_f64(),
        }
    }
}

/// Validates and solves `prob`.
pub fn solve(prob: &ProblemData, settings: &Settings) -> Solution {
    match Solver::new(prob.clone(), *settings) {
        Ok(mut s) => s.solve(),
        Err(_) => Solution::invalid(),
    }
}

/// Returns whether the stopping criteria hold for a solution, recomputing
/// every residual and scale from the problem data.
pub fn check_optimality(prob: &ProblemData, sol: &Solution, eps_abs: f64, eps_rel: f64) -> bool {
    let ninf = |v: &[f64]| v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let (n, p, m) = (prob.n, prob.p, prob.m());
    let mut px = vec![0.0; n];
    let mut ax = vec![0.0; p];
    let mut gx = vec![0.0; m];
    let mut aty = vec![0.0; n];
    let mut gtz = vec![0.0; n];
    prob.P.mul(&sol.x, &mut px);
    prob.A.mul(&sol.x, &mut ax);
    prob.G.mul(&sol.x, &mut gx);
    prob.A.mul_t(&sol.y, &mut aty);
    prob.G.mul_t(&sol.z, &mut gtz);
    let mut pres = 0.0f64;
    for i in 0..p {
        pres = pres.max((ax[i] - prob.b[i]).abs());
    }
    for i in 0..m {
        pres = pres.max((gx[i] + sol.s[i] - prob.h[i]).abs());
    }
    let mut dres = 0.0f64;
    for i in 0..n {
        dres = dres.max((px[i] + aty[i] + gtz[i] + prob.c[i]).abs());
    }
    let xpx: f64 = sol.x.iter().zip(&px).map(|(a, b)| a * b).sum();
    let pobj = 0.5 * xpx + sol.x.iter().zip(&prob.c).map(|(a, b)| a * b).sum::<f64>();
    let dobj = -0.5 * xpx
        - sol.y.iter().zip(&prob.b).map(|(a, b)| a * b).sum::<f64>()
        - sol.z.iter().zip(&prob.h).map(|(a, b)| a * b).sum::<f64>();
    let gap = sol.s.iter().zip(&sol.z).map(|(a, b)| a * b).sum::<f64>().abs();
    let pscale = [ninf(&ax), ninf(&prob.b), ninf(&gx), ninf(&prob.h), ninf(&sol.s)].into_iter().fold(0.0, f64::max);
    let dscale = [ninf(&px), ninf(&aty), ninf(&gtz), ninf(&prob.c)].into_iter().fold(0.0, f64::max);
    let gscale = 1.0f64.max(pobj.abs()).max(dobj.abs());
    pres <= eps_abs + eps_rel * pscale && dres <= eps_abs + eps_rel * dscale && gap <= eps_abs + eps_rel * gscale
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Unsolved => "unsolved",
            Status::Optimal => "optimal",
            Status::MaxIters => "max_iters",
            Status::NumericalError => "numerical_error",
            Status::InvalidData => "invalid_data",
        }
    }
}
