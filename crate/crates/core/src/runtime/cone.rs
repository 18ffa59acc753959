//! Cone arithmetic for a product of one nonnegative orthant of dimension `l`
//! followed by second-order cones of dimensions `q[0], q[1], ...`.
//!
//! Vectors are laid out block by block in that order with no padding. The
//! Nesterov-Todd scaling state is a length-`m` vector `w` holding the orthant
//! scalings in the first `l` slots and the normalized scaling point `w̄` of
//! each second-order cone in its block, plus one `eta` per second-order cone.

use super::utils::{max2, min2};

pub fn identity(l: usize, q: &[usize], e: &mut [f64]) {
    for v in e[..l].iter_mut() {
        *v = 1.0;
    }
    let mut off = l;
    for &qi in q {
        e[off] = 1.0;
        for v in e[off + 1..off + qi].iter_mut() {
            *v = 0.0;
        }
        off += qi;
    }
}

fn soc_dot_tail(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 1..a.len() {
        acc += a[i] * b[i];
    }
    acc
}

/// `u0^2 - ||u1||^2` for one second-order cone block.
pub fn soc_det(u: &[f64]) -> f64 {
    u[0] * u[0] - soc_dot_tail(u, u)
}

pub fn jordan_prod(l: usize, q: &[usize], u: &[f64], v: &[f64], out: &mut [f64]) {
    for j in 0..l {
        out[j] = u[j] * v[j];
    }
    let mut off = l;
    for &qi in q {
        let ub = &u[off..off + qi];
        let vb = &v[off..off + qi];
        let ob = &mut out[off..off + qi];
        ob[0] = ub[0] * vb[0] + soc_dot_tail(ub, vb);
        for i in 1..qi {
            ob[i] = ub[0] * vb[i] + vb[0] * ub[i];
        }
        off += qi;
    }
}

/// Solves `u ∘ out = w` for `out`. Returns `false` when `u` is not strictly
/// inside the cone, in which case `out` is left partially written.
pub fn jordan_div(l: usize, q: &[usize], u: &[f64], w: &[f64], out: &mut [f64]) -> bool {
    for j in 0..l {
        if u[j] <= 0.0 {
            return false;
        }
        out[j] = w[j] / u[j];
    }
    let mut off = l;
    for &qi in q {
        let ub = &u[off..off + qi];
        let wb = &w[off..off + qi];
        let det = soc_det(ub);
        if det <= 0.0 || ub[0] <= 0.0 {
            return false;
        }
        let v0 = (ub[0] * wb[0] - soc_dot_tail(ub, wb)) / det;
        out[off] = v0;
        for i in 1..qi {
            out[off + i] = (wb[i] - v0 * ub[i]) / ub[0];
        }
        off += qi;
    }
    true
}

pub fn in_cone(l: usize, q: &[usize], u: &[f64], strict: bool) -> bool {
    for &v in &u[..l] {
        if (strict && v <= 0.0) || v < 0.0 {
            return false;
        }
    }
    let mut off = l;
    for &qi in q {
        let ub = &u[off..off + qi];
        let nrm = soc_dot_tail(ub, ub).sqrt();
        if (strict && ub[0] <= nrm) || ub[0] < nrm {
            return false;
        }
        off += qi;
    }
    true
}

/// Smallest `alpha` such that `u + alpha * e` lies in the cone. Negative when
/// `u` is already interior; `-inf` for an empty cone.
pub fn min_shift(l: usize, q: &[usize], u: &[f64]) -> f64 {
    let mut alpha = f64::NEG_INFINITY;
    for &v in &u[..l] {
        alpha = max2(alpha, -v);
    }
    let mut off = l;
    for &qi in q {
        let ub = &u[off..off + qi];
        alpha = max2(alpha, soc_dot_tail(ub, ub).sqrt() - ub[0]);
        off += qi;
    }
    alpha
}

fn soc_max_step(u: &[f64], du: &[f64], cap: f64) -> f64 {
    let c0 = soc_det(u);
    let c1 = 2.0 * (u[0] * du[0] - soc_dot_tail(u, du));
    let c2 = soc_det(du);
    // On (or numerically past) the boundary: any outward motion is blocked.
    if c0 <= 0.0 && (c1 < 0.0 || (c1 == 0.0 && c2 < 0.0)) {
        return 0.0;
    }
    // u0 + a d0 must stay nonnegative; this also catches a double root at the
    // apex that rounding can hide from the discriminant.
    let mut root = if du[0] < 0.0 { -u[0] / du[0] } else { f64::INFINITY };
    if c2 == 0.0 {
        if c1 < 0.0 {
            root = min2(root, -c0 / c1);
        }
    } else {
        let disc = c1 * c1 - 4.0 * c2 * c0;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            let qq = if c1 >= 0.0 { -0.5 * (c1 + sq) } else { -0.5 * (c1 - sq) };
            let r1 = qq / c2;
            if r1 > 0.0 {
                root = min2(root, r1);
            }
            if qq != 0.0 {
                let r2 = c0 / qq;
                if r2 > 0.0 {
                    root = min2(root, r2);
                }
            }
        }
    }
    min2(root, cap)
}

/// Largest `alpha` in `[0, cap]` with `u + alpha * du` in the cone, for `u`
/// strictly interior.
pub fn max_step(l: usize, q: &[usize], u: &[f64], du: &[f64], cap: f64) -> f64 {
    let mut alpha = cap;
    for j in 0..l {
        if du[j] < 0.0 {
            alpha = min2(alpha, -u[j] / du[j]);
        }
    }
    let mut off = l;
    for &qi in q {
        alpha = min2(alpha, soc_max_step(&u[off..off + qi], &du[off..off + qi], cap));
        off += qi;
    }
    max2(alpha, 0.0)
}

/// Computes the Nesterov-Todd scaling of `(s, z)` and the scaled point
/// `lambda = W z = W^{-1} s`. Returns `false` if either point has left the
/// cone interior.
pub fn nt_scaling(
    l: usize,
    q: &[usize],
    s: &[f64],
    z: &[f64],
    w: &mut [f64],
    eta: &mut [f64],
    lambda: &mut [f64],
) -> bool {
    for j in 0..l {
        if !(s[j] > 0.0 && z[j] > 0.0) {
            return false;
        }
        w[j] = (s[j] / z[j]).sqrt();
        lambda[j] = (s[j] * z[j]).sqrt();
    }
    let mut off = l;
    for (k, &qi) in q.iter().enumerate() {
        let sb = &s[off..off + qi];
        let zb = &z[off..off + qi];
        let sdet = soc_det(sb);
        let zdet = soc_det(zb);
        if !(sdet > 0.0 && zdet > 0.0 && sb[0] > 0.0 && zb[0] > 0.0) {
            return false;
        }
        let sn = sdet.sqrt();
        let zn = zdet.sqrt();
        let mut sz = 0.0;
        for i in 0..qi {
            sz += (sb[i] / sn) * (zb[i] / zn);
        }
        let gamma = ((1.0 + sz) * 0.5).sqrt();
        let wb = &mut w[off..off + qi];
        wb[0] = (sb[0] / sn + zb[0] / zn) / (2.0 * gamma);
        for i in 1..qi {
            wb[i] = (sb[i] / sn - zb[i] / zn) / (2.0 * gamma);
        }
        debug_assert!(wb[0] >= 1.0 - 1e-12);
        eta[k] = (sn / zn).sqrt();
        off += qi;
    }
    let mut off = l;
    for (k, &qi) in q.iter().enumerate() {
        soc_apply(eta[k], &w[off..off + qi], &z[off..off + qi], &mut lambda[off..off + qi], false);
        off += qi;
    }
    true
}

fn soc_apply(eta: f64, wb: &[f64], v: &[f64], out: &mut [f64], inverse: bool) {
    let (scale, sgn) = if inverse { (1.0 / eta, -1.0) } else { (eta, 1.0) };
    let w1v1 = sgn * soc_dot_tail(wb, v);
    let coef = v[0] + w1v1 / (1.0 + wb[0]);
    out[0] = scale * (wb[0] * v[0] + w1v1);
    for i in 1..wb.len() {
        out[i] = scale * (v[i] + coef * (sgn * wb[i]));
    }
}

/// `out = W v` (W is symmetric, so this is also `W^T v`).
pub fn apply_w(l: usize, q: &[usize], w: &[f64], eta: &[f64], v: &[f64], out: &mut [f64]) {
    for j in 0..l {
        out[j] = w[j] * v[j];
    }
    let mut off = l;
    for (k, &qi) in q.iter().enumerate() {
        soc_apply(eta[k], &w[off..off + qi], &v[off..off + qi], &mut out[off..off + qi], false);
        off += qi;
    }
}

/// `out = W^{-1} v`.
pub fn apply_w_inv(l: usize, q: &[usize], w: &[f64], eta: &[f64], v: &[f64], out: &mut [f64]) {
    for j in 0..l {
        out[j] = v[j] / w[j];
    }
    let mut off = l;
    for (k, &qi) in q.iter().enumerate() {
        soc_apply(eta[k], &w[off..off + qi], &v[off..off + qi], &mut out[off..off + qi], true);
        off += qi;
    }
}

/// Entry `(r, c)` of the `W^T W` block of one second-order cone,
/// `eta^2 (2 w̄ w̄^T - J)`.
pub fn soc_wtw(eta: f64, wb: &[f64], r: usize, c: usize) -> f64 {
    let j = if r != c {
        0.0
    } else if r == 0 {
        1.0
    } else {
        -1.0
    };
    eta * eta * (2.0 * wb[r] * wb[c] - j)
}
