//! Minkowski (Lorentzian) bilinear form on R^{n+1}.
//!
//! The form is `<u, v>_M = -u^1 v^1 + sum_{j>=2} u^j v^j`, i.e. signature
//! (-, +, ..., +) with the timelike coordinate first. The hyperboloid model
//! lives on the sheet `<p, p>_M = -1`, `p^1 > 0`, where the form restricted
//! to tangent spaces is positive definite.

use nalgebra::DVector;

use crate::error::{Error, Result};

/// `<u, v>_M` on raw coordinate slices. Callers guarantee equal, nonzero
/// lengths; this is the allocation-free workhorse behind the public API and
/// the solver's inner loops.
#[inline]
pub(crate) fn mink_dot(u: &[f64], v: &[f64]) -> f64 {
    debug_assert_eq!(u.len(), v.len());
    debug_assert!(!u.is_empty());
    let mut acc = -u[0] * v[0];
    for j in 1..u.len() {
        acc += u[j] * v[j];
    }
    acc
}

/// `<u, u>_M` on a raw coordinate slice.
#[inline]
pub(crate) fn mink_norm_sq(u: &[f64]) -> f64 {
    mink_dot(u, u)
}

/// `<v, v>_M` for a vector tangent to the sheet at `p`, in a
/// cancellation-free form.
///
/// In the raw quadratic form the timelike square nearly cancels against the
/// spatial squares: for a tangent at a point of radius R the discarded mass
/// is `sinh(R)^2` times the surviving norm, so the naive evaluation loses a
/// relative `eps sinh(R)^2` — enough to displace far geodesics by more than
/// 1e-8 once the exponential map multiplies the norm error by `sinh d`.
/// Substituting the tangency relation `v^1 p^1 = v_s . p_s` and splitting
/// `v_s = a p_s/|p_s| + w` collapses the form to the sum of squares
/// `|w|^2 + (a/p^1)^2` (using `(p^1)^2 - |p_s|^2 = 1` on the sheet).
#[inline]
pub(crate) fn tangent_norm_sq(p: &[f64], v: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), v.len());
    // Near the origin the cancellation is bounded ((v^1)^2 is at most
    // 1 - 1/(p^1)^2 of the spatial mass) and the raw form is accurate.
    if p[0] < 2.0 {
        return mink_norm_sq(v).max(0.0);
    }
    let mut ps2 = 0.0;
    let mut dot = 0.0;
    for j in 1..p.len() {
        ps2 += p[j] * p[j];
        dot += v[j] * p[j];
    }
    let psn = ps2.sqrt();
    let a = dot / psn;
    let mut w2 = 0.0;
    for j in 1..p.len() {
        let w = v[j] - (a / psn) * p[j];
        w2 += w * w;
    }
    w2 + (a / p[0]) * (a / p[0])
}

/// Minkowski pseudo-inner product `<u, v>_M` with a dimension check.
pub fn minkowski_inner(u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    if u.len() != v.len() || u.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    Ok(mink_dot(u.as_slice(), v.as_slice()))
}
