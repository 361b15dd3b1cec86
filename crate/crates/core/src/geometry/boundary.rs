//! Ideal boundary directions and their radial vector fields.
//!
//! A point xi of the ideal boundary is represented by an anchored unit
//! tangent: the pair (y, xi_y) with xi_y in T_y, |xi_y| = 1, standing for the
//! class of the geodesic ray `t -> exp_y(t xi_y)`. The radial field of xi at
//! an arbitrary point p is the initial velocity of the ray from p asymptotic
//! to the same boundary point:
//!
//! `xi_p = (y + xi_y + <p, y + xi_y>_M p) / | y + xi_y + <p, y + xi_y>_M p |_M`
//!
//! (`y + xi_y` is a null vector generating the corresponding boundary ray,
//! and the formula is its normalized tangential projection at p.)

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::minkowski::{mink_dot, mink_norm_sq};
use super::point::HPoint;
use super::tangent::TangentVec;
use crate::error::{Error, Result};

/// An ideal boundary point, stored as an anchor and a unit tangent there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryDir {
    anchor: HPoint,
    dir: TangentVec,
}

impl BoundaryDir {
    /// `dir` must be anchored at `anchor` and is normalized to unit length;
    /// a zero direction is rejected.
    pub fn new(anchor: HPoint, dir: TangentVec) -> Result<Self> {
        if dir.base().coords() != anchor.coords() {
            return Err(Error::InvalidParameter(
                "boundary direction must be anchored at its base point".into(),
            ));
        }
        let dir = dir.normalized().map_err(|_| {
            Error::InvalidParameter("boundary direction must be nonzero".into())
        })?;
        Ok(BoundaryDir { anchor, dir })
    }

    pub fn anchor(&self) -> &HPoint {
        &self.anchor
    }

    /// The anchored unit tangent `xi_y`.
    pub fn dir(&self) -> &TangentVec {
        &self.dir
    }

    /// The null generator `y + xi_y` of the boundary ray; radial fields are
    /// projections of this single ambient vector, which is what the solver
    /// precomputes per quantile spec.
    pub(crate) fn null_generator(&self) -> DVector<f64> {
        self.anchor.coords() + self.dir.vec()
    }

    /// Whether two representations denote the same ideal point: their radial
    /// fields agree at a reference point within `tol`.
    pub fn approx_same(&self, other: &BoundaryDir, at: &HPoint, tol: f64) -> bool {
        let a = radial_field(self, at);
        let b = radial_field(other, at);
        (a.vec() - b.vec()).norm() <= tol
    }
}

/// Raw radial field: projects the null generator `s` onto `T_p` and
/// normalizes, writing into `out`. `s` and `p` are ambient coordinate slices.
///
/// Evaluated as `s / (-<p,s>_M) - p` rather than `s + <p,s>_M p` followed by
/// normalization: the two are parallel (`|s + <p,s> p|_M = -<p,s>_M` since s
/// is null), but the division-first form keeps the cancellation error
/// relative to the unit result instead of relative to the tiny projected
/// norm, which matters when p lies far out in the direction of xi.
#[inline]
pub(crate) fn radial_field_raw(s: &[f64], p: &[f64], out: &mut [f64]) {
    let a = mink_dot(p, s);
    debug_assert!(a < 0.0, "null generator must be future-pointing");
    let inv = -1.0 / a;
    for j in 0..p.len() {
        out[j] = s[j] * inv - p[j];
    }
    // Sweep residual off-tangency back out, then renormalize.
    let b = mink_dot(p, out);
    for j in 0..p.len() {
        out[j] += b * p[j];
    }
    let norm = mink_norm_sq(out).max(0.0).sqrt();
    debug_assert!(norm > 0.0, "radial field degenerate: null generator parallel to base");
    for x in out.iter_mut() {
        *x /= norm;
    }
}

/// The unit radial vector `xi_p` of the boundary point `xi` at `p`
/// (kappa = -1 normalization; scale by sqrt(-kappa) for other curvatures).
pub fn radial_field(xi: &BoundaryDir, p: &HPoint) -> TangentVec {
    let s = xi.null_generator();
    let mut out = DVector::zeros(p.coords().len());
    radial_field_raw(s.as_slice(), p.as_slice(), out.as_mut_slice());
    TangentVec::project(p.clone(), out)
        .normalized()
        .expect("radial field is nonzero")
}
