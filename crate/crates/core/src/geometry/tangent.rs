//! Tangent vectors and orthonormal tangent frames.
//!
//! The tangent space at p is `T_p = { v : <p, v>_M = 0 }`; the Minkowski form
//! restricted to `T_p` is positive definite, so tangent norms and angles are
//! ordinary Euclidean notions in disguise.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::minkowski::{mink_dot, tangent_norm_sq};
use super::point::HPoint;
use crate::error::{Error, Result};

/// Construction tolerance for `<p, v>_M = 0`.
pub const TANGENT_TOL: f64 = 1e-9;

/// A tangent vector anchored at a base point of the hyperboloid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentVec {
    base: HPoint,
    vec: DVector<f64>,
}

impl TangentVec {
    /// Validates orthogonality to the base within [`TANGENT_TOL`], then
    /// projects exactly onto the tangent space.
    pub fn new(base: HPoint, vec: DVector<f64>) -> Result<Self> {
        if vec.len() != base.coords().len() {
            return Err(Error::DimensionMismatch {
                expected: base.coords().len(),
                found: vec.len(),
            });
        }
        let defect = mink_dot(base.as_slice(), vec.as_slice());
        if defect.abs() > TANGENT_TOL {
            return Err(Error::InvalidTangent { defect });
        }
        Ok(Self::project(base, vec))
    }

    /// Orthogonal projection of an ambient vector onto `T_base`:
    /// `v + <p, v>_M p` (using `<p, p>_M = -1`).
    pub fn project(base: HPoint, vec: DVector<f64>) -> Self {
        let c = mink_dot(base.as_slice(), vec.as_slice());
        let vec = vec + base.coords() * c;
        TangentVec { base, vec }
    }

    pub(crate) fn from_raw_unchecked(base: HPoint, vec: DVector<f64>) -> Self {
        TangentVec { base, vec }
    }

    pub fn zero(base: HPoint) -> Self {
        let n1 = base.coords().len();
        TangentVec {
            base,
            vec: DVector::zeros(n1),
        }
    }

    pub fn base(&self) -> &HPoint {
        &self.base
    }

    pub fn vec(&self) -> &DVector<f64> {
        &self.vec
    }

    #[inline]
    pub(crate) fn as_slice(&self) -> &[f64] {
        self.vec.as_slice()
    }

    /// Riemannian norm at the base (kappa = -1 convention); on a manifold of
    /// curvature kappa the norm is this divided by sqrt(-kappa). Evaluated
    /// in the tangency-stable form, which stays accurate at far-out base
    /// points where the raw Minkowski square cancels.
    pub fn norm(&self) -> f64 {
        tangent_norm_sq(self.base.as_slice(), self.vec.as_slice()).sqrt()
    }

    /// Riemannian inner product with another tangent vector at the same base.
    pub fn inner(&self, other: &TangentVec) -> f64 {
        debug_assert_eq!(self.vec.len(), other.vec.len());
        mink_dot(self.vec.as_slice(), other.vec.as_slice())
    }

    pub fn scale(&self, s: f64) -> TangentVec {
        TangentVec {
            base: self.base.clone(),
            vec: &self.vec * s,
        }
    }

    pub fn add(&self, other: &TangentVec) -> TangentVec {
        debug_assert_eq!(self.vec.len(), other.vec.len());
        TangentVec {
            base: self.base.clone(),
            vec: &self.vec + &other.vec,
        }
    }

    /// Unit vector in the same direction; errors on (numerically) zero input.
    pub fn normalized(&self) -> Result<TangentVec> {
        let n = self.norm();
        if n <= 0.0 {
            return Err(Error::InvalidParameter(
                "cannot normalize a zero tangent vector".into(),
            ));
        }
        Ok(self.scale(1.0 / n))
    }

    /// Coefficients of this vector in an orthonormal tangent basis at the
    /// same base point.
    pub fn basis_coords(&self, basis: &[TangentVec]) -> DVector<f64> {
        DVector::from_fn(basis.len(), |i, _| self.inner(&basis[i]))
    }
}

/// Deterministic orthonormal basis of `T_p`: Gram–Schmidt (with respect to
/// the Minkowski form) applied to the projections of the canonical ambient
/// basis vectors e_1, ..., e_{n+1}, taken in that fixed order and skipping
/// directions that project to (numerical) zero. At the origin this returns
/// the canonical spatial axes exactly.
pub fn tangent_basis(p: &HPoint) -> Vec<TangentVec> {
    let n1 = p.coords().len();
    let n = n1 - 1;
    let mut basis: Vec<TangentVec> = Vec::with_capacity(n);
    for j in 0..n1 {
        if basis.len() == n {
            break;
        }
        let mut e = DVector::zeros(n1);
        e[j] = 1.0;
        let mut v = TangentVec::project(p.clone(), e);
        for b in &basis {
            let c = v.inner(b);
            v = TangentVec::from_raw_unchecked(p.clone(), v.vec() - b.vec() * c);
        }
        let norm = v.norm();
        if norm > 1e-12 {
            basis.push(v.scale(1.0 / norm));
        }
    }
    debug_assert_eq!(basis.len(), n, "tangent basis must have n vectors");
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn canonical_basis_at_origin() {
        let p = HPoint::origin(2);
        let basis = tangent_basis(&p);
        assert_eq!(basis.len(), 2);
        assert_eq!(basis[0].vec().as_slice(), &[0.0, 1.0, 0.0]);
        assert_eq!(basis[1].vec().as_slice(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn basis_is_orthonormal_at_generic_point() {
        let p = HPoint::new(dvector![2.0f64.cosh(), 2.0f64.sinh() * 0.6, 2.0f64.sinh() * 0.8])
            .unwrap();
        let basis = tangent_basis(&p);
        assert_eq!(basis.len(), 2);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (basis[i].inner(&basis[j]) - want).abs() < 1e-12,
                    "gram[{i}][{j}]"
                );
                assert!(mink_dot(p.as_slice(), basis[i].as_slice()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn basis_coords_round_trip() {
        let p = HPoint::new(dvector![1.5f64.cosh(), 0.0, 1.5f64.sinh()]).unwrap();
        let basis = tangent_basis(&p);
        let v = TangentVec::project(p.clone(), dvector![0.3, -0.7, 0.9]);
        let coords = v.basis_coords(&basis);
        let mut rebuilt = TangentVec::zero(p);
        for (i, b) in basis.iter().enumerate() {
            rebuilt = rebuilt.add(&b.scale(coords[i]));
        }
        assert!((rebuilt.vec() - v.vec()).norm() < 1e-13);
    }

    #[test]
    fn non_tangent_vector_is_rejected() {
        let p = HPoint::origin(2);
        let err = TangentVec::new(p, dvector![0.5, 1.0, 0.0]);
        assert!(matches!(err, Err(Error::InvalidTangent { .. })));
    }
}
