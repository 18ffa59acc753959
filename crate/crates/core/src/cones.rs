//! Allocating wrappers around the cone runtime for library callers and tests.

use thiserror::Error;

use crate::problem::ConeSpec;
use crate::runtime::cone;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConeError {
    #[error("divisor is not strictly inside the cone")]
    SingularJordan,
    #[error("iterate left the cone interior")]
    ScalingFailure,
}

pub fn cone_identity(cones: &ConeSpec) -> Vec<f64> {
    let mut e = vec![0.0; cones.m()];
    cone::identity(cones.l, &cones.q, &mut e);
    e
}

pub fn jordan_product(u: &[f64], v: &[f64], cones: &ConeSpec) -> Vec<f64> {
    let mut out = vec![0.0; cones.m()];
    cone::jordan_prod(cones.l, &cones.q, u, v, &mut out);
    out
}

/// Returns `v` with `u ∘ v = w`.
pub fn jordan_div(u: &[f64], w: &[f64], cones: &ConeSpec) -> Result<Vec<f64>, ConeError> {
    let mut out = vec![0.0; cones.m()];
    if cone::jordan_div(cones.l, &cones.q, u, w, &mut out) {
        Ok(out)
    } else {
        Err(ConeError::SingularJordan)
    }
}

pub fn in_cone(u: &[f64], cones: &ConeSpec, strict: bool) -> bool {
    cone::in_cone(cones.l, &cones.q, u, strict)
}

/// Smallest `alpha` with `u + alpha e` in the cone.
pub fn min_shift_to_cone(u: &[f64], cones: &ConeSpec) -> f64 {
    cone::min_shift(cones.l, &cones.q, u)
}

/// Largest `alpha` in `[0, 1]` with `u + alpha du` in the cone.
pub fn max_step_to_boundary(u: &[f64], du: &[f64], cones: &ConeSpec) -> f64 {
    cone::max_step(cones.l, &cones.q, u, du, 1.0)
}

/// Nesterov-Todd scaling of a pair of interior points.
#[derive(Debug, Clone, PartialEq)]
pub struct NtScaling {
    pub cones: ConeSpec,
    /// Orthant scalings `sqrt(s/z)` followed by the normalized scaling point
    /// of each second-order cone.
    pub w: Vec<f64>,
    pub eta: Vec<f64>,
    /// `W z = W^{-1} s`
    pub lambda: Vec<f64>,
}

/// Dense `W^T W` blocks: orthant diagonal and one row-major `q x q` block
/// per second-order cone.
#[derive(Debug, Clone, PartialEq)]
pub struct WtwBlocks {
    pub orthant: Vec<f64>,
    pub soc: Vec<Vec<f64>>,
}

pub fn compute_nt_scaling(s: &[f64], z: &[f64], cones: &ConeSpec) -> Result<NtScaling, ConeError> {
    let m = cones.m();
    let mut w = vec![0.0; m];
    let mut eta = vec![0.0; cones.nsoc()];
    let mut lambda = vec![0.0; m];
    if cone::nt_scaling(cones.l, &cones.q, s, z, &mut w, &mut eta, &mut lambda) {
        Ok(NtScaling { cones: cones.clone(), w, eta, lambda })
    } else {
        Err(ConeError::ScalingFailure)
    }
}

impl NtScaling {
    /// Scaling with `W = I`.
    pub fn identity(cones: &ConeSpec) -> Self {
        let e = cone_identity(cones);
        NtScaling { cones: cones.clone(), w: e.clone(), eta: vec![1.0; cones.nsoc()], lambda: e }
    }

    pub fn apply_w(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        cone::apply_w(self.cones.l, &self.cones.q, &self.w, &self.eta, v, &mut out);
        out
    }

    pub fn apply_w_inv(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        cone::apply_w_inv(self.cones.l, &self.cones.q, &self.w, &self.eta, v, &mut out);
        out
    }

    pub fn wtw_blocks(&self) -> WtwBlocks {
        let l = self.cones.l;
        let orthant = self.w[..l].iter().map(|w| w * w).collect();
        let soc = self
            .cones
            .q
            .iter()
            .zip(self.cones.soc_offsets())
            .enumerate()
            .map(|(k, (&qi, off))| {
                let wb = &self.w[off..off + qi];
                let mut blk = vec![0.0; qi * qi];
                for r in 0..qi {
                    for c in 0..qi {
                        blk[r * qi + c] = cone::soc_wtw(self.eta[k], wb, r, c);
                    }
                }
                blk
            })
            .collect();
        WtwBlocks { orthant, soc }
    }
}
