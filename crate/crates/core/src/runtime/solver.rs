//! Primal-dual interior-point driver with Mehrotra predictor-corrector steps.
//!
//! The driver is written against [`KktBackend`], which owns the problem data
//! and the factorization of the regularized KKT matrix
//!
//! ```text
//! [ P + es*I    A^T     G^T           ]
//! [ A          -es*I    0             ]
//! [ G           0      -W^T W - es*I  ]
//! ```
//!
//! stored symmetrically permuted. All scratch memory is carved out of one
//! caller-provided slice, so a solve performs no heap allocation.

use super::cone;
use super::utils::{dot, max2, min2, norm_inf};

/// Step sizes below this are treated as a stalled line search.
pub const MIN_STEP: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Settings {
    pub max_iters: usize,
    pub eps_abs: f64,
    pub eps_rel: f64,
    /// Static regularization added to the KKT diagonal.
    pub eps_static: f64,
    /// Dynamic regularization applied to LDL pivots.
    pub eps_dyn: f64,
    pub refine_iters: usize,
    pub refine_tol: f64,
    pub step_fraction: f64,
    pub verbose: bool,
}

impl Settings {
    pub const fn new() -> Self {
        Settings {
            max_iters: 200,
            eps_abs: 1e-7,
            eps_rel: 1e-7,
            eps_static: 1e-8,
            eps_dyn: 1e-8,
            refine_iters: 3,
            refine_tol: 1e-9,
            step_fraction: 0.99,
            verbose: false,
        }
    }
}

impl Default for Settings {
    fn default() -> Self {
        Settings::new()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Unsolved,
    Optimal,
    MaxIters,
    NumericalError,
    InvalidData,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Info {
    pub status: Status,
    pub iters: usize,
    pub pobj: f64,
    pub dobj: f64,
    /// Primal feasibility residual `||(Ax - b, Gx + s - h)||_inf`.
    pub pres: f64,
    /// Stationarity residual `||Px + c + A^T y + G^T z||_inf`.
    pub dres: f64,
    /// Complementarity `|s^T z|`.
    pub gap: f64,
    pub mu: f64,
    pub sigma: f64,
    pub step: f64,
    /// Pivots that hit the wrong-sign branch of dynamic regularization.
    pub nreg: usize,
}

impl Info {
    pub const fn new() -> Self {
        Info {
            status: Status::Unsolved,
            iters: 0,
            pobj: 0.0,
            dobj: 0.0,
            pres: 0.0,
            dres: 0.0,
            gap: 0.0,
            mu: 0.0,
            sigma: 0.0,
            step: 0.0,
            nreg: 0,
        }
    }
}

impl Default for Info {
    fn default() -> Self {
        Info::new()
    }
}

/// Problem data and KKT factorization used by the driver.
///
/// The `kkt_*` and `ldl_solve` methods act on vectors in permuted order:
/// entry `i` of a permuted vector is entry `perm()[i]` of the natural
/// `(x, y, z)` ordering.
pub trait KktBackend {
    fn n(&self) -> usize;
    fn p(&self) -> usize;
    fn m(&self) -> usize;
    fn l(&self) -> usize;
    fn q(&self) -> &[usize];
    fn c(&self) -> &[f64];
    fn b(&self) -> &[f64];
    fn h(&self) -> &[f64];
    /// `y = P x`
    fn p_mul(&self, x: &[f64], y: &mut [f64]);
    /// `y = A x`
    fn a_mul(&self, x: &[f64], y: &mut [f64]);
    /// `x = A^T y`
    fn at_mul(&self, y: &[f64], x: &mut [f64]);
    /// `y = G x`
    fn g_mul(&self, x: &[f64], y: &mut [f64]);
    /// `x = G^T y`
    fn gt_mul(&self, y: &[f64], x: &mut [f64]);
    /// Reloads the data slots and sets the scaling block to `-(1 + eps_s) I`.
    fn set_nt_identity(&mut self, eps_s: f64);
    /// Sets the scaling block to `-W^T W - eps_s I`.
    fn set_nt(&mut self, w: &[f64], eta: &[f64], eps_s: f64);
    /// Numeric LDL factorization. Returns the number of wrong-sign pivots, or
    /// `None` when a non-finite value is encountered.
    fn factor(&mut self, eps_d: f64) -> Option<usize>;
    fn perm(&self) -> &[usize];
    /// Expected pivot signs (`+1` / `-1`) in permuted order.
    fn kkt_signs(&self) -> &[f64];
    /// `y = K̂ x` with the regularized KKT matrix.
    fn kkt_mul(&self, x: &[f64], y: &mut [f64]);
    /// In-place solve with the current factors.
    fn ldl_solve(&self, x: &mut [f64]);
}

/// Outcome of an iterative-refinement solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefineStats {
    pub passes: usize,
    /// `||rhs - K x||_inf` for the returned `x`.
    pub residual: f64,
}

/// Scratch buffers for [`solve_refined`], each of the system dimension.
pub struct RefineBufs<'a> {
    pub r: &'a mut [f64],
    pub dx: &'a mut [f64],
    pub xc: &'a mut [f64],
    pub rc: &'a mut [f64],
}

fn refine_residual<K: Fn(&[f64], &mut [f64])>(kmul: &K, rhs: &[f64], x: &[f64], r: &mut [f64]) -> f64 {
    kmul(x, r);
    for i in 0..rhs.len() {
        r[i] = rhs[i] - r[i];
    }
    norm_inf(r)
}

/// Solves `K x = rhs` using a factorization of a perturbed matrix `K̂`.
///
/// `kmul` applies the unperturbed `K`; `ldl` solves in place with `K̂`.
/// Passes stop once `||rhs - K x||_inf <= tol (1 + ||rhs||_inf)`, after
/// `max_passes`, or as soon as a pass fails to reduce the residual, in which
/// case the best iterate is kept.
pub fn solve_refined<K, S>(
    kmul: K,
    ldl: S,
    rhs: &[f64],
    x: &mut [f64],
    bufs: RefineBufs<'_>,
    max_passes: usize,
    tol: f64,
) -> RefineStats
where
    K: Fn(&[f64], &mut [f64]),
    S: Fn(&mut [f64]),
{
    let RefineBufs { r, dx, xc, rc } = bufs;
    x.copy_from_slice(rhs);
    ldl(x);
    let target = tol * (1.0 + norm_inf(rhs));
    let mut res = refine_residual(&kmul, rhs, x, r);
    let mut passes = 0;
    while passes < max_passes && res > target {
        dx.copy_from_slice(r);
        ldl(dx);
        for i in 0..x.len() {
            xc[i] = x[i] + dx[i];
        }
        let cand = refine_residual(&kmul, rhs, xc, rc);
        passes += 1;
        if !(cand < res) {
            break;
        }
        x.copy_from_slice(xc);
        r.copy_from_slice(rc);
        res = cand;
    }
    RefineStats { passes, residual: res }
}

/// Scratch and iterate storage for one solve.
pub struct Work<'a> {
    pub x: &'a mut [f64],
    pub s: &'a mut [f64],
    pub y: &'a mut [f64],
    pub z: &'a mut [f64],
    pub rx: &'a mut [f64],
    pub ry: &'a mut [f64],
    pub rz: &'a mut [f64],
    pub px: &'a mut [f64],
    pub aty: &'a mut [f64],
    pub gtz: &'a mut [f64],
    pub ax: &'a mut [f64],
    pub gx: &'a mut [f64],
    pub lambda: &'a mut [f64],
    pub w: &'a mut [f64],
    pub eta: &'a mut [f64],
    pub rs: &'a mut [f64],
    pub t1: &'a mut [f64],
    pub t2: &'a mut [f64],
    pub ds: &'a mut [f64],
    pub ds_a: &'a mut [f64],
    /// `(dx, dy, dz)` of the combined direction.
    pub sol: &'a mut [f64],
    /// `(dx, dy, dz)` of the affine direction.
    pub sol_a: &'a mut [f64],
    pub rhs: &'a mut [f64],
    pub kb: &'a mut [f64],
    pub kx: &'a mut [f64],
    pub kr: &'a mut [f64],
    pub kd: &'a mut [f64],
    pub kxc: &'a mut [f64],
    pub krc: &'a mut [f64],
}

fn take<'a>(buf: &mut &'a mut [f64], len: usize) -> &'a mut [f64] {
    let b = core::mem::take(buf);
    let (head, tail) = b.split_at_mut(len);
    *buf = tail;
    head
}

impl<'a> Work<'a> {
    /// Number of `f64` slots needed for a problem of the given dimensions.
    pub const fn len(n: usize, p: usize, m: usize, nsoc: usize) -> usize {
        let nk = n + p + m;
        5 * n + 3 * p + 12 * m + nsoc + 9 * nk
    }

    pub fn split(buf: &'a mut [f64], n: usize, p: usize, m: usize, nsoc: usize) -> Work<'a> {
        assert!(buf.len() >= Work::len(n, p, m, nsoc));
        let nk = n + p + m;
        let mut b = buf;
        Work {
            x: take(&mut b, n),
            s: take(&mut b, m),
            y: take(&mut b, p),
            z: take(&mut b, m),
            rx: take(&mut b, n),
            ry: take(&mut b, p),
            rz: take(&mut b, m),
            px: take(&mut b, n),
            aty: take(&mut b, n),
            gtz: take(&mut b, n),
            ax: take(&mut b, p),
            gx: take(&mut b, m),
            lambda: take(&mut b, m),
            w: take(&mut b, m),
            eta: take(&mut b, nsoc),
            rs: take(&mut b, m),
            t1: take(&mut b, m),
            t2: take(&mut b, m),
            ds: take(&mut b, m),
            ds_a: take(&mut b, m),
            sol: take(&mut b, nk),
            sol_a: take(&mut b, nk),
            rhs: take(&mut b, nk),
            kb: take(&mut b, nk),
            kx: take(&mut b, nk),
            kr: take(&mut b, nk),
            kd: take(&mut b, nk),
            kxc: take(&mut b, nk),
            krc: take(&mut b, nk),
        }
    }
}

/// Solves `K sol = rhs` (natural ordering) with iterative refinement against
/// the unregularized KKT matrix.
pub fn solve_kkt<B: KktBackend>(
    bk: &B,
    st: &Settings,
    rhs: &[f64],
    sol: &mut [f64],
    kb: &mut [f64],
    kx: &mut [f64],
    bufs: RefineBufs<'_>,
) -> RefineStats {
    let perm = bk.perm();
    for i in 0..kb.len() {
        kb[i] = rhs[perm[i]];
    }
    let eps = st.eps_static;
    let kmul = |x: &[f64], y: &mut [f64]| {
        bk.kkt_mul(x, y);
        let sg = bk.kkt_signs();
        for i in 0..x.len() {
            y[i] -= sg[i] * eps * x[i];
        }
    };
    let stats = solve_refined(kmul, |x: &mut [f64]| bk.ldl_solve(x), kb, kx, bufs, st.refine_iters, st.refine_tol);
    for i in 0..kx.len() {
        sol[perm[i]] = kx[i];
    }
    stats
}

fn solve_into_sol<B: KktBackend>(bk: &B, st: &Settings, w: &mut Work<'_>, affine: bool) -> RefineStats {
    let target: &mut [f64] = if affine { &mut *w.sol_a } else { &mut *w.sol };
    solve_kkt(bk, st, w.rhs, target, w.kb, w.kx, RefineBufs { r: w.kr, dx: w.kd, xc: w.kxc, rc: w.krc })
}

fn shift_into_cone(l: usize, q: &[usize], u: &mut [f64]) {
    if cone::in_cone(l, q, u, true) {
        return;
    }
    let shift = 1.0 + cone::min_shift(l, q, u);
    for v in u[..l].iter_mut() {
        *v += shift;
    }
    let mut off = l;
    for &qi in q {
        u[off] += shift;
        off += qi;
    }
}

/// Computes the starting point from the KKT system with `W = I`, then shifts
/// `s` and `z` into the cone interior.
pub fn initialize<B: KktBackend>(bk: &mut B, w: &mut Work<'_>, st: &Settings) -> bool {
    let (n, p) = (bk.n(), bk.p());
    bk.set_nt_identity(st.eps_static);
    if bk.factor(st.eps_dyn).is_none() {
        return false;
    }
    let (c, b, h) = (bk.c(), bk.b(), bk.h());
    for i in 0..n {
        w.rhs[i] = -c[i];
    }
    w.rhs[n..n + p].copy_from_slice(b);
    w.rhs[n + p..].copy_from_slice(h);
    solve_into_sol(bk, st, w, false);
    w.x.copy_from_slice(&w.sol[..n]);
    w.y.copy_from_slice(&w.sol[n..n + p]);
    w.z.copy_from_slice(&w.sol[n + p..]);
    for i in 0..w.s.len() {
        w.s[i] = -w.z[i];
    }
    let (l, q) = (bk.l(), bk.q());
    shift_into_cone(l, q, w.s);
    shift_into_cone(l, q, w.z);
    true
}

/// Fills `rx = Px + c + A^T y + G^T z`, `ry = Ax - b`, `rz = Gx + s - h`
/// and returns the duality measure `s^T z / m` (zero when `m = 0`).
pub fn compute_residuals<B: KktBackend>(bk: &B, w: &mut Work<'_>) -> f64 {
    bk.p_mul(w.x, w.px);
    bk.at_mul(w.y, w.aty);
    bk.gt_mul(w.z, w.gtz);
    bk.a_mul(w.x, w.ax);
    bk.g_mul(w.x, w.gx);
    let (c, b, h) = (bk.c(), bk.b(), bk.h());
    for i in 0..w.rx.len() {
        w.rx[i] = w.px[i] + c[i] + w.aty[i] + w.gtz[i];
    }
    for i in 0..w.ry.len() {
        w.ry[i] = w.ax[i] - b[i];
    }
    for i in 0..w.rz.len() {
        w.rz[i] = w.gx[i] + w.s[i] - h[i];
    }
    let m = bk.m();
    if m == 0 {
        0.0
    } else {
        dot(w.s, w.z) / m as f64
    }
}

/// Primal and dual objectives at the current iterate. Requires `px` from
/// [`compute_residuals`].
pub fn objectives<B: KktBackend>(bk: &B, w: &Work<'_>) -> (f64, f64) {
    let xpx = dot(w.x, w.px);
    let pobj = 0.5 * xpx + dot(bk.c(), w.x);
    let dobj = -0.5 * xpx - dot(bk.b(), w.y) - dot(bk.h(), w.z);
    (pobj, dobj)
}

/// Infinity norms of the constant problem vectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DataNorms {
    pub c: f64,
    pub b: f64,
    pub h: f64,
}

impl DataNorms {
    pub fn of<B: KktBackend>(bk: &B) -> DataNorms {
        DataNorms { c: norm_inf(bk.c()), b: norm_inf(bk.b()), h: norm_inf(bk.h()) }
    }
}

/// Evaluates the stopping criteria, recording residual norms in `info`.
pub fn check_termination<B: KktBackend>(
    bk: &B,
    w: &Work<'_>,
    st: &Settings,
    norms: &DataNorms,
    info: &mut Info,
) -> bool {
    let (pobj, dobj) = objectives(bk, w);
    info.pobj = pobj;
    info.dobj = dobj;
    info.pres = max2(norm_inf(w.ry), norm_inf(w.rz));
    info.dres = norm_inf(w.rx);
    info.gap = dot(w.s, w.z).abs();
    let pscale = max2(max2(max2(norm_inf(w.ax), norms.b), max2(norm_inf(w.gx), norms.h)), norm_inf(w.s));
    let dscale = max2(max2(norm_inf(w.px), norm_inf(w.aty)), max2(norm_inf(w.gtz), norms.c));
    let gscale = max2(1.0, max2(pobj.abs(), dobj.abs()));
    info.pres <= st.eps_abs + st.eps_rel * pscale
        && info.dres <= st.eps_abs + st.eps_rel * dscale
        && info.gap <= st.eps_abs + st.eps_rel * gscale
}

/// Builds `rhs = (-rx, -ry, -rz + W (lambda \ rs))` from `w.rs`.
fn build_rhs<B: KktBackend>(bk: &B, w: &mut Work<'_>) -> bool {
    let (n, p, l, q) = (bk.n(), bk.p(), bk.l(), bk.q());
    if !cone::jordan_div(l, q, w.lambda, w.rs, w.t1) {
        return false;
    }
    cone::apply_w(l, q, w.w, w.eta, w.t1, w.t2);
    for i in 0..n {
        w.rhs[i] = -w.rx[i];
    }
    for i in 0..p {
        w.rhs[n + i] = -w.ry[i];
    }
    for i in 0..w.rz.len() {
        w.rhs[n + p + i] = -w.rz[i] + w.t2[i];
    }
    true
}

/// `ds = -rz - G dx`, with `dx` the leading block of `sol`.
fn recover_ds<B: KktBackend>(bk: &B, sol: &[f64], rz: &[f64], gdx: &mut [f64], ds: &mut [f64]) {
    bk.g_mul(&sol[..bk.n()], gdx);
    for i in 0..ds.len() {
        ds[i] = -rz[i] - gdx[i];
    }
}

/// Affine-scaling direction into `sol_a` / `ds_a`. Requires the scaling and
/// the factorization for the current iterate.
pub fn predictor<B: KktBackend>(bk: &B, w: &mut Work<'_>, st: &Settings) -> bool {
    let (l, q) = (bk.l(), bk.q());
    cone::jordan_prod(l, q, w.lambda, w.lambda, w.rs);
    if !build_rhs(bk, w) {
        return false;
    }
    solve_into_sol(bk, st, w, true);
    recover_ds(bk, w.sol_a, w.rz, w.t1, w.ds_a);
    true
}

/// Returns `(sigma, rho, alpha)` for the affine direction in `w`.
pub fn centering<B: KktBackend>(bk: &B, w: &Work<'_>) -> (f64, f64, f64) {
    let (n, p, m, l, q) = (bk.n(), bk.p(), bk.m(), bk.l(), bk.q());
    if m == 0 {
        return (0.0, 0.0, 1.0);
    }
    let dz_a = &w.sol_a[n + p..];
    let alpha = min2(cone::max_step(l, q, w.s, w.ds_a, 1.0), cone::max_step(l, q, w.z, dz_a, 1.0));
    let mut num = 0.0;
    for i in 0..m {
        num += (w.s[i] + alpha * w.ds_a[i]) * (w.z[i] + alpha * dz_a[i]);
    }
    let rho = num / dot(w.s, w.z);
    let r = max2(0.0, min2(1.0, rho));
    (r * r * r, rho, alpha)
}

/// Combined predictor-corrector direction into `sol` / `ds`.
pub fn combined<B: KktBackend>(bk: &B, w: &mut Work<'_>, st: &Settings, sigma: f64, mu: f64) -> bool {
    let (n, p, l, q) = (bk.n(), bk.p(), bk.l(), bk.q());
    // Second-order correction (W^{-1} ds_a) ∘ (W dz_a); ds is free scratch here.
    cone::apply_w_inv(l, q, w.w, w.eta, w.ds_a, w.ds);
    cone::apply_w(l, q, w.w, w.eta, &w.sol_a[n + p..], w.t2);
    cone::jordan_prod(l, q, w.ds, w.t2, w.rs);
    cone::jordan_prod(l, q, w.lambda, w.lambda, w.t1);
    let sm = sigma * mu;
    for i in 0..l {
        w.rs[i] = w.t1[i] + w.rs[i] - sm;
    }
    let mut off = l;
    for &qi in q {
        w.rs[off] = w.t1[off] + w.rs[off] - sm;
        for i in off + 1..off + qi {
            w.rs[i] += w.t1[i];
        }
        off += qi;
    }
    if !build_rhs(bk, w) {
        return false;
    }
    solve_into_sol(bk, st, w, false);
    recover_ds(bk, w.sol, w.rz, w.t1, w.ds);
    true
}

/// Step length `min(1, step_fraction * alpha_max)` for the combined direction.
pub fn step_length<B: KktBackend>(bk: &B, w: &Work<'_>, st: &Settings) -> f64 {
    let (n, p, l, q) = (bk.n(), bk.p(), bk.l(), bk.q());
    let amax =
        min2(cone::max_step(l, q, w.s, w.ds, f64::INFINITY), cone::max_step(l, q, w.z, &w.sol[n + p..], f64::INFINITY));
    min2(1.0, st.step_fraction * amax)
}

pub fn take_step(w: &mut Work<'_>, n: usize, p: usize, alpha: f64) {
    for i in 0..n {
        w.x[i] += alpha * w.sol[i];
    }
    for i in 0..p {
        w.y[i] += alpha * w.sol[n + i];
    }
    for i in 0..w.s.len() {
        w.s[i] += alpha * w.ds[i];
        w.z[i] += alpha * w.sol[n + p + i];
    }
}

/// Runs the interior-point method to completion. The result is reported in
/// `info`; the final iterate is left in `w`.
pub fn solve<B: KktBackend>(bk: &mut B, w: &mut Work<'_>, st: &Settings, info: &mut Info) {
    *info = Info::new();
    if !initialize(bk, w, st) {
        info.status = Status::NumericalError;
        return;
    }
    let (n, p, l) = (bk.n(), bk.p(), bk.l());
    let norms = DataNorms::of(bk);
    loop {
        let mu = compute_residuals(bk, w);
        info.mu = mu;
        if check_termination(bk, w, st, &norms, info) {
            info.status = Status::Optimal;
            break;
        }
        if info.iters >= st.max_iters {
            info.status = Status::MaxIters;
            break;
        }
        if !cone::nt_scaling(l, bk.q(), w.s, w.z, w.w, w.eta, w.lambda) {
            info.status = Status::NumericalError;
            break;
        }
        bk.set_nt(w.w, w.eta, st.eps_static);
        match bk.factor(st.eps_dyn) {
            Some(nreg) => info.nreg += nreg,
            None => {
                info.status = Status::NumericalError;
                break;
            }
        }
        if !predictor(bk, w, st) {
            info.status = Status::NumericalError;
            break;
        }
        let (sigma, _, _) = centering(bk, w);
        if !combined(bk, w, st, sigma, mu) {
            info.status = Status::NumericalError;
            break;
        }
        let alpha = step_length(bk, w, st);
        info.sigma = sigma;
        info.step = alpha;
        if !(alpha >= MIN_STEP) {
            info.status = Status::NumericalError;
            break;
        }
        take_step(w, n, p, alpha);
        info.iters += 1;
        if st.verbose {
            println!(
                "{:3}  pobj {:+.6e}  pres {:.2e}  dres {:.2e}  gap {:.2e}  mu {:.2e}  sigma {:.2e}  step {:.3}",
                info.iters, info.pobj, info.pres, info.dres, info.gap, mu, sigma, alpha
            );
        }
    }
    if st.verbose {
        println!("status {:?} after {} iterations, objective {:+.8e}", info.status, info.iters, info.pobj);
    }
}
