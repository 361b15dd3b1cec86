//! Exponential map, logarithmic map, and geodesic distance on the unit
//! hyperboloid.
//!
//! All three are closed-form:
//!
//! * `exp_p(v) = cosh(|v|) p + sinh(|v|) v / |v|`
//! * `log_p(q) = arccosh(-<p,q>) (q + <p,q> p) / |q + <p,q> p|`
//! * `d(p, q)  = arccosh(-<p,q>)`
//!
//! A manifold of curvature kappa < 0 is represented on the same sheet via
//! the scaled isometry that divides distances by sqrt(-kappa); the embedding
//! coordinates of exp and log are unchanged by that scaling, so these maps
//! are curvature-free and only norms/gradients carry kappa factors (see the
//! solver module).

use super::minkowski::{mink_dot, tangent_norm_sq};
use super::point::HPoint;
use super::tangent::TangentVec;
use nalgebra::DVector;

/// sinh(t)/t, stable through t = 0.
#[inline]
pub(crate) fn sinhc(t: f64) -> f64 {
    if t.abs() < 1e-8 {
        1.0 + t * t / 6.0
    } else {
        t.sinh() / t
    }
}

/// Raw exponential map into a caller-supplied buffer; returns nothing but
/// leaves a (not yet re-projected) sheet point in `out`. The velocity norm
/// uses the tangency-stable form: sinh(|v|) amplifies any norm error, so the
/// raw Minkowski square (noise `eps sinh(R)^2` at base radius R) is not
/// accurate enough for long geodesics from far-out base points.
#[inline]
pub(crate) fn exp_raw(p: &[f64], v: &[f64], out: &mut [f64]) {
    let norm = tangent_norm_sq(p, v).sqrt();
    let ch = norm.cosh();
    let sc = sinhc(norm);
    for j in 0..p.len() {
        out[j] = ch * p[j] + sc * v[j];
    }
}

/// The core distance kernel: `(d, sinh d, cosh d)` for two sheet points.
///
/// Everything is derived from `y = cosh d - 1` through the exact identities
/// `sinh d = sqrt(y (2 + y))` and `d = ln(1 + y + sinh d)`, which are stable
/// over the whole range of y. The raw inner product `-<p,q>_M` carries
/// absolute rounding noise of order `eps * p^1 q^1`, so when `y` computed
/// that way falls below `1e-4 * p^1 q^1` it is recomputed from the
/// coordinate difference (`y = |p - q|^2_M / 2` holds identically on the
/// sheet, and the difference form has no cancellation for close points).
#[inline]
pub(crate) fn dist_sinh_cosh_raw(p: &[f64], q: &[f64]) -> (f64, f64, f64) {
    let c = -mink_dot(p, q);
    let mut y = c - 1.0;
    if y < 1e-4 * (p[0] * q[0]) {
        let d0 = p[0] - q[0];
        let mut diff2 = -d0 * d0;
        for j in 1..p.len() {
            diff2 += (p[j] - q[j]) * (p[j] - q[j]);
        }
        y = (0.5 * diff2).max(0.0);
    }
    let sh = (y * (2.0 + y)).sqrt();
    let d = (y + sh).ln_1p();
    (d, sh, 1.0 + y)
}

/// Raw geodesic distance (kappa = -1).
#[inline]
pub(crate) fn dist_raw(p: &[f64], q: &[f64]) -> f64 {
    dist_sinh_cosh_raw(p, q).0
}

/// Geodesic through p with initial velocity v, evaluated at parameter 1.
/// The result is re-projected onto the sheet; a (numerically) zero velocity
/// returns the base point.
pub fn exp_map(p: &HPoint, v: &TangentVec) -> HPoint {
    debug_assert_eq!(v.base().coords(), p.coords());
    let norm = v.norm();
    if norm == 0.0 {
        return p.clone();
    }
    let mut out = DVector::zeros(p.coords().len());
    exp_raw(p.as_slice(), v.as_slice(), out.as_mut_slice());
    HPoint::project(out).expect("exp image stays on the future cone")
}

/// Inverse of the exponential map: the tangent vector at p pointing to q
/// with `|log_p(q)|_M = d(p, q)`. Coincident inputs give the zero vector.
///
/// The unnormalized direction `u = q - cosh(d) p` has `|u|_M = sinh d`
/// identically, so the scaling uses the kernel's sinh value instead of a
/// recomputed Minkowski norm (which cancels catastrophically both for
/// near-coincident and for far-from-origin points).
pub fn log_map(p: &HPoint, q: &HPoint) -> TangentVec {
    let (d, sh, ch) = dist_sinh_cosh_raw(p.as_slice(), q.as_slice());
    if sh == 0.0 {
        return TangentVec::zero(p.clone());
    }
    let u = q.coords() - p.coords() * ch;
    TangentVec::project(p.clone(), u * (d / sh))
}

/// Geodesic distance on the unit hyperboloid (kappa = -1). For curvature
/// kappa != -1 divide by sqrt(-kappa).
pub fn dist(p: &HPoint, q: &HPoint) -> f64 {
    dist_raw(p.as_slice(), q.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::tangent::tangent_basis;
    use nalgebra::dvector;

    #[test]
    fn exp_unit_tangent_at_origin() {
        // exp_{(1,0,0)}((0,1,0)) = (cosh 1, sinh 1, 0)
        let p = HPoint::origin(2);
        let v = TangentVec::new(p.clone(), dvector![0.0, 1.0, 0.0]).unwrap();
        let q = exp_map(&p, &v);
        assert!((q.coords()[0] - 1.0f64.cosh()).abs() < 1e-15);
        assert!((q.coords()[1] - 1.0f64.sinh()).abs() < 1e-15);
        assert_eq!(q.coords()[2], 0.0);
    }

    #[test]
    fn dist_along_geodesic() {
        let p = HPoint::origin(2);
        let q = HPoint::new(dvector![2.0f64.cosh(), 0.0, 2.0f64.sinh()]).unwrap();
        assert!((dist(&p, &q) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn log_inverts_exp() {
        let p = HPoint::new(dvector![1.2f64.cosh(), 1.2f64.sinh() * 0.28, 1.2f64.sinh() * 0.96])
            .unwrap();
        let v = TangentVec::project(p.clone(), dvector![0.4, -1.1, 0.75]);
        let q = exp_map(&p, &v);
        let w = log_map(&p, &q);
        assert!(
            (w.vec() - v.vec()).norm() < 1e-8,
            "log(exp(v)) != v: {:?}",
            (w.vec() - v.vec()).norm()
        );
        assert!((w.norm() - dist(&p, &q)).abs() < 1e-12);
    }

    #[test]
    fn coincident_points_give_zero_log_and_distance() {
        let p = HPoint::origin(3);
        assert_eq!(dist(&p, &p), 0.0);
        assert_eq!(log_map(&p, &p).norm(), 0.0);
    }

    #[test]
    fn near_coincident_distance_is_stable() {
        // Points 1e-9 apart: acosh on the raw inner product loses half the
        // digits; the difference branch keeps them.
        let p = HPoint::origin(2);
        let t = 1e-9;
        let v = TangentVec::new(p.clone(), dvector![0.0, t, 0.0]).unwrap();
        let q = exp_map(&p, &v);
        let d = dist(&p, &q);
        assert!(
            (d - t).abs() < 1e-18,
            "near-coincident distance error {:e}",
            (d - t).abs()
        );
    }

    #[test]
    fn exp_zero_returns_base() {
        let p = HPoint::origin(2);
        let z = TangentVec::zero(p.clone());
        assert_eq!(exp_map(&p, &z), p);
    }

    #[test]
    fn triangle_inequality_on_a_sample() {
        let p = HPoint::origin(2);
        let basis = tangent_basis(&p);
        let q = exp_map(&p, &basis[0].scale(1.3));
        let r = exp_map(&p, &basis[1].scale(0.7));
        assert!(dist(&q, &r) <= dist(&q, &p) + dist(&p, &r) + 1e-12);
    }
}
