//! Antipodally paired direction sets: the discretization of the boundary
//! sphere the contour and measure machinery sups/averages over.

use crate::error::{Error, Result};
use crate::geometry::{parallel_transport, tangent_basis, BoundaryDir, HPoint, TangentVec};

/// K unit tangents at a common center, required antipodally paired (K even,
/// `dirs[k + K/2] = -dirs[k]`) so that the v -> -v pairing in the asymmetry
/// measures is exact. Default construction has K = 24.
#[derive(Debug, Clone)]
pub struct DirectionSet {
    center: HPoint,
    dirs: Vec<TangentVec>,
}

pub const DEFAULT_K: usize = 24;

impl DirectionSet {
    /// The canonical planar set: the angles `2 pi k / K` laid out at the base
    /// point (1,0,0) as tangents `(0, cos, sin)` and carried to `center` by
    /// parallel transport along the single connecting geodesic. At the base
    /// point itself the tangents are exactly the canonical ones. Only defined
    /// for n = 2.
    pub fn canonical(center: &HPoint, k: usize) -> Result<Self> {
        if center.dim() != 2 {
            return Err(Error::InvalidParameter(format!(
                "canonical direction sets are planar; got dimension {}",
                center.dim()
            )));
        }
        if k < 2 || !k.is_multiple_of(2) {
            return Err(Error::OddDirections(k));
        }
        let origin = HPoint::origin(2);
        let basis = tangent_basis(&origin); // exactly (0,1,0), (0,0,1)
        let dirs = (0..k)
            .map(|i| {
                let th = std::f64::consts::TAU * i as f64 / k as f64;
                let v = basis[0].scale(th.cos()).add(&basis[1].scale(th.sin()));
                parallel_transport(&v, center)
            })
            .collect();
        Ok(DirectionSet {
            center: center.clone(),
            dirs,
        })
    }

    /// Wraps explicit directions; they must be unit, anchored at `center`,
    /// and antipodally paired within 1e-9.
    pub fn from_dirs(center: HPoint, dirs: Vec<TangentVec>) -> Result<Self> {
        let k = dirs.len();
        if k < 2 || !k.is_multiple_of(2) {
            return Err(Error::OddDirections(k));
        }
        for d in &dirs {
            if d.base().coords() != center.coords() {
                return Err(Error::InvalidParameter(
                    "direction not anchored at the set's center".into(),
                ));
            }
            if (d.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(
                    "directions must be unit tangents".into(),
                ));
            }
        }
        for i in 0..k / 2 {
            let defect = (dirs[i].vec() + dirs[i + k / 2].vec()).norm();
            if defect > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "directions {i} and {} are not antipodal (defect {defect:e})",
                    i + k / 2
                )));
            }
        }
        Ok(DirectionSet { center, dirs })
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn center(&self) -> &HPoint {
        &self.center
    }

    pub fn dirs(&self) -> &[TangentVec] {
        &self.dirs
    }

    pub fn dir(&self, i: usize) -> &TangentVec {
        &self.dirs[i]
    }

    /// Index of the direction opposite `i`.
    pub fn antipode(&self, i: usize) -> usize {
        (i + self.dirs.len() / 2) % self.dirs.len()
    }

    /// The ideal boundary point determined by direction `i`.
    pub fn boundary_dir(&self, i: usize) -> BoundaryDir {
        BoundaryDir::new(self.center.clone(), self.dirs[i].clone())
            .expect("directions are unit tangents")
    }

    /// The same directions re-anchored at `new_center` by parallel transport
    /// along the single geodesic from the current center (exactly the
    /// `Gamma_{p -> m}` construction the pipelines use); a no-op when the
    /// centers coincide.
    pub fn transported_to(&self, new_center: &HPoint) -> DirectionSet {
        let dirs = self
            .dirs
            .iter()
            .map(|d| parallel_transport(d, new_center))
            .collect();
        DirectionSet {
            center: new_center.clone(),
            dirs,
        }
    }
}
