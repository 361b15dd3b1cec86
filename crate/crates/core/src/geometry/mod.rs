//! Hyperboloid-model geometry: the Minkowski form, points, tangents,
//! exp/log/dist, the Poincaré-ball isometry, ideal boundary directions with
//! their radial fields, parallel transport, and Lorentz isometries.
//!
//! Convention: points always live on the unit sheet (`<p,p>_M = -1`). A
//! manifold of curvature kappa < 0 is handled through the scaled isometry
//! that leaves embedding coordinates untouched and divides distances by
//! sqrt(-kappa); [`Curvature`] carries that factor where it matters (losses,
//! gradients, reported distances).

mod boundary;
mod isometry;
mod maps;
mod minkowski;
mod point;
mod tangent;
mod transport;

pub use boundary::{radial_field, BoundaryDir};
pub use isometry::LorentzIsometry;
pub use maps::{dist, exp_map, log_map};
pub use minkowski::minkowski_inner;
pub use point::{from_ball, to_ball, BPoint, HPoint, ON_SHEET_TOL};
pub use tangent::{tangent_basis, TangentVec, TANGENT_TOL};
pub use transport::parallel_transport;

pub(crate) use boundary::radial_field_raw;
pub(crate) use maps::{dist_raw, dist_sinh_cosh_raw, exp_raw};
pub(crate) use minkowski::{mink_dot, mink_norm_sq};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Sectional curvature kappa < 0 of the model space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Curvature(f64);

impl Curvature {
    /// The standard kappa = -1 space every dataset is stored in.
    pub const STANDARD: Curvature = Curvature(-1.0);

    pub fn new(kappa: f64) -> Result<Self> {
        if !kappa.is_finite() || kappa >= 0.0 {
            return Err(Error::InvalidCurvature(kappa));
        }
        Ok(Curvature(kappa))
    }

    pub fn kappa(&self) -> f64 {
        self.0
    }

    /// sqrt(-kappa): the factor between unit-sheet distances and distances
    /// on the curvature-kappa manifold (`d_kappa = d_sheet / sqrt(-kappa)`).
    pub fn sqrt_neg(&self) -> f64 {
        (-self.0).sqrt()
    }
}

impl Default for Curvature {
    fn default() -> Self {
        Curvature::STANDARD
    }
}
