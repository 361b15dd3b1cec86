//! Lorentz isometries of the hyperboloid model: matrices G with
//! `G^T J G = J` (J = diag(-1, 1, ..., 1)) preserving the upper sheet.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::boundary::BoundaryDir;
use super::maps::{dist, exp_map, log_map};
use super::point::HPoint;
use super::tangent::{tangent_basis, TangentVec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LorentzIsometry {
    mat: DMatrix<f64>,
}

impl LorentzIsometry {
    /// Validates `G^T J G = J` within `tol` (1e-9 is the construction
    /// contract used throughout).
    pub fn new(mat: DMatrix<f64>, tol: f64) -> Result<Self> {
        if !mat.is_square() || mat.nrows() < 2 {
            return Err(Error::InvalidParameter(
                "Lorentz isometry must be a square matrix of size >= 2".into(),
            ));
        }
        let iso = LorentzIsometry { mat };
        let defect = iso.defect();
        if defect > tol {
            return Err(Error::InvalidParameter(format!(
                "matrix is not Lorentz-orthogonal: max |G^T J G - J| = {defect:e}"
            )));
        }
        Ok(iso)
    }

    pub fn identity(n: usize) -> Self {
        LorentzIsometry {
            mat: DMatrix::identity(n + 1, n + 1),
        }
    }

    /// Hyperbolic translation along the geodesic from `from` to `to`, mapping
    /// `from` to `to` and acting as the identity on the Minkowski-orthogonal
    /// complement of their plane.
    pub fn translation(from: &HPoint, to: &HPoint) -> Self {
        let n1 = from.coords().len();
        let d = dist(from, to);
        if d < 1e-14 {
            return Self::identity(n1 - 1);
        }
        let a = from.coords();
        let t = log_map(from, to).scale(1.0 / d); // unit tangent at `from`
        let t = t.vec();
        let (ch, sh) = (d.cosh(), d.sinh());
        // G = I - (ch-1) a a^T J - sh t a^T J + sh a t^T J + (ch-1) t t^T J
        let mut g = DMatrix::identity(n1, n1);
        for i in 0..n1 {
            for j in 0..n1 {
                let jsign = if j == 0 { -1.0 } else { 1.0 };
                g[(i, j)] += jsign
                    * (-(ch - 1.0) * a[i] * a[j] - sh * t[i] * a[j]
                        + sh * a[i] * t[j]
                        + (ch - 1.0) * t[i] * t[j]);
            }
        }
        LorentzIsometry { mat: g }
    }

    /// Spatial rotation fixing the origin (1, 0, ..., 0): the block matrix
    /// `1 (+) O` for an orthogonal n x n matrix O.
    pub fn rotation(o: &DMatrix<f64>) -> Result<Self> {
        if !o.is_square() {
            return Err(Error::InvalidParameter("rotation block must be square".into()));
        }
        let n = o.nrows();
        let gram = o.transpose() * o;
        let defect = (&gram - DMatrix::identity(n, n)).abs().max();
        if defect > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "rotation block is not orthogonal (defect {defect:e})"
            )));
        }
        let mut g = DMatrix::identity(n + 1, n + 1);
        g.view_mut((1, 1), (n, n)).copy_from(o);
        Ok(LorentzIsometry { mat: g })
    }

    /// A random orientation-mixing isometry: a uniform rotation (QR of a
    /// Gaussian matrix) composed with a translation to a random point at
    /// distance |N(0, translate_scale^2)| from the origin. Used by the
    /// equivariance test batteries.
    pub fn random<R: Rng>(n: usize, translate_scale: f64, rng: &mut R) -> Self {
        let gauss = DMatrix::from_fn(n, n, |_, _| {
            // Box–Muller on two uniform draws keeps this free of any
            // distribution-crate dependency.
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        });
        let q = gauss.qr().q();
        let rot = Self::rotation(&q).expect("QR factor is orthogonal");

        let origin = HPoint::origin(n);
        let basis = tangent_basis(&origin);
        let mut dir = TangentVec::zero(origin.clone());
        for b in &basis {
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
            dir = dir.add(&b.scale(z));
        }
        let r: f64 = rng.gen_range(0.0..1.0) * translate_scale;
        let target = if dir.norm() > 1e-12 {
            exp_map(&origin, &dir.normalized().unwrap().scale(r))
        } else {
            origin.clone()
        };
        Self::translation(&origin, &target).compose(&rot)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// `self` after `other` (matrix product `self.mat * other.mat`).
    pub fn compose(&self, other: &LorentzIsometry) -> Self {
        LorentzIsometry {
            mat: &self.mat * &other.mat,
        }
    }

    /// Lorentz inverse `J G^T J` — exact up to rounding, no factorization.
    pub fn inverse(&self) -> Self {
        let n1 = self.mat.nrows();
        let mut inv = self.mat.transpose();
        // Conjugation by J flips the sign of the first row and column.
        for j in 1..n1 {
            inv[(0, j)] = -inv[(0, j)];
            inv[(j, 0)] = -inv[(j, 0)];
        }
        LorentzIsometry { mat: inv }
    }

    /// max |G^T J G - J|: how far the matrix is from Lorentz-orthogonal.
    pub fn defect(&self) -> f64 {
        let n1 = self.mat.nrows();
        let mut j = DMatrix::identity(n1, n1);
        j[(0, 0)] = -1.0;
        let gtjg = self.mat.transpose() * &j * &self.mat;
        (gtjg - j).abs().max()
    }

    pub fn apply_point(&self, p: &HPoint) -> HPoint {
        let image: DVector<f64> = &self.mat * p.coords();
        HPoint::project(image).expect("Lorentz image of a sheet point is on the sheet")
    }

    pub fn apply_tangent(&self, v: &TangentVec) -> TangentVec {
        let base = self.apply_point(v.base());
        let image: DVector<f64> = &self.mat * v.vec();
        TangentVec::project(base, image)
    }

    pub fn apply_boundary(&self, xi: &BoundaryDir) -> BoundaryDir {
        let dir = self.apply_tangent(xi.dir());
        let anchor = dir.base().clone();
        BoundaryDir::new(anchor, dir).expect("isometry preserves unit tangents")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::mink_dot;
    use nalgebra::dvector;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn sample_points() -> (HPoint, HPoint) {
        let p = HPoint::new(dvector![1.1f64.cosh(), 1.1f64.sinh(), 0.0]).unwrap();
        let q = HPoint::new(dvector![0.7f64.cosh(), 0.0, -0.7f64.sinh()]).unwrap();
        (p, q)
    }

    #[test]
    fn translation_maps_from_to_to() {
        let (p, q) = sample_points();
        let g = LorentzIsometry::translation(&p, &q);
        assert!(g.defect() < 1e-12);
        let image = g.apply_point(&p);
        assert!(dist(&image, &q) < 1e-12);
    }

    #[test]
    fn preserves_inner_products_and_distances() {
        let (p, q) = sample_points();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let g = LorentzIsometry::random(2, 1.5, &mut rng);
            assert!(g.defect() < 1e-12);
            let (gp, gq) = (g.apply_point(&p), g.apply_point(&q));
            let before = mink_dot(p.as_slice(), q.as_slice());
            let after = mink_dot(gp.as_slice(), gq.as_slice());
            assert!((before - after).abs() < 1e-9);
            assert!((dist(&p, &q) - dist(&gp, &gq)).abs() < 1e-9);
        }
    }

    #[test]
    fn inverse_composes_to_identity() {
        let mut rng = StdRng::seed_from_u64(11);
        let g = LorentzIsometry::random(2, 2.0, &mut rng);
        let eye = g.compose(&g.inverse());
        let defect = (eye.matrix() - DMatrix::identity(3, 3)).abs().max();
        assert!(defect < 1e-12, "G G^{{-1}} defect {defect:e}");
    }

    #[test]
    fn commutes_with_exp() {
        // G exp_p(v) = exp_{Gp}(Gv)
        let (p, _) = sample_points();
        let v = TangentVec::project(p.clone(), dvector![0.2, 0.9, -0.5]);
        let mut rng = StdRng::seed_from_u64(23);
        let g = LorentzIsometry::random(2, 1.0, &mut rng);
        let lhs = g.apply_point(&exp_map(&p, &v));
        let rhs = exp_map(&g.apply_point(&p), &g.apply_tangent(&v));
        assert!(dist(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn non_lorentz_matrix_is_rejected() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.1, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(LorentzIsometry::new(m, 1e-9).is_err());
    }
}
