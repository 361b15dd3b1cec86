//! Parallel transport along connecting geodesics.

use super::minkowski::mink_dot;
use super::point::HPoint;
use super::tangent::TangentVec;

/// Transports `v` from its base p to `to` = q along the unique geodesic
/// between them, using the closed form
///
/// `G(v) = v + <q, v>_M / (1 - <p, q>_M) * (p + q)`.
///
/// The denominator `1 - <p,q>_M = 1 + cosh d(p,q) >= 2` is never small.
/// Transport is a linear isometry `T_p -> T_q`; for p = q it is the identity.
pub fn parallel_transport(v: &TangentVec, to: &HPoint) -> TangentVec {
    let p = v.base();
    let c = mink_dot(to.as_slice(), v.as_slice());
    let denom = 1.0 - mink_dot(p.as_slice(), to.as_slice());
    let moved = v.vec() + (p.coords() + to.coords()) * (c / denom);
    TangentVec::project(to.clone(), moved)
}
