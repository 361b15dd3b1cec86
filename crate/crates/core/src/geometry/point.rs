//! Points of the hyperboloid model and the Poincaré ball, with the isometry
//! between them.
//!
//! An [`HPoint`] stores n+1 ambient coordinates on the upper sheet
//! `<p, p>_M = -1`, `p^1 > 0`. A [`BPoint`] stores n ball coordinates with
//! `|b| < 1`. The stereographic-type map `h(p) = (p^2, ..., p^{n+1}) / (p^1 + 1)`
//! and its inverse are isometries onto the Poincaré ball and are used for
//! CSV/plot coordinates; all computation happens on the hyperboloid.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::minkowski::mink_norm_sq;
use crate::error::{Error, Result};

/// Construction tolerance for the sheet constraint `<p,p>_M = -1`.
pub const ON_SHEET_TOL: f64 = 1e-9;

/// A point on the upper sheet of the unit hyperboloid in R^{n+1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HPoint(DVector<f64>);

impl HPoint {
    /// Validates the sheet constraint (within [`ON_SHEET_TOL`], relative to
    /// the coordinate scale `(p^1)^2` so far-out points are not rejected for
    /// representation noise) and the upper-sheet condition `p^1 > 0`, then
    /// normalizes exactly onto the sheet so downstream arithmetic starts
    /// from a clean representative.
    pub fn new(coords: DVector<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidPoint(format!(
                "need at least 2 ambient coordinates, got {}",
                coords.len()
            )));
        }
        if coords[0] <= 0.0 {
            return Err(Error::InvalidPoint(format!(
                "p^1 = {} is not on the upper sheet",
                coords[0]
            )));
        }
        let m = mink_norm_sq(coords.as_slice());
        let scale = (coords[0] * coords[0]).max(1.0);
        if (m + 1.0).abs() > ON_SHEET_TOL * scale {
            return Err(Error::InvalidPoint(format!(
                "<p,p>_M = {m:.12} is not -1 within {ON_SHEET_TOL:e} (relative)"
            )));
        }
        Self::project(coords)
    }

    /// Snaps a near-sheet vector onto the upper sheet by lifting: the
    /// timelike coordinate is replaced by `sqrt(1 + |s|^2)` where `s` is the
    /// spatial part. Unlike a radial rescale by `1/sqrt(-<c,c>_M)`, the lift
    /// involves no cancellation and stays exact arbitrarily far from the
    /// origin, where `<c,c>_M` itself is dominated by rounding noise. Used
    /// after exponential maps and isometries to remove accumulated drift.
    pub fn project(mut coords: DVector<f64>) -> Result<Self> {
        if coords[0] <= 0.0 {
            return Err(Error::InvalidPoint(
                "vector points to the lower sheet".into(),
            ));
        }
        let mut s2 = 0.0;
        for j in 1..coords.len() {
            s2 += coords[j] * coords[j];
        }
        coords[0] = (1.0 + s2).sqrt();
        Ok(HPoint(coords))
    }

    /// The base point (1, 0, ..., 0) of the n-dimensional hyperboloid.
    pub fn origin(n: usize) -> Self {
        let mut c = DVector::zeros(n + 1);
        c[0] = 1.0;
        HPoint(c)
    }

    /// Manifold dimension n (one less than the ambient dimension).
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.0
    }

    #[inline]
    pub(crate) fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    /// The ball-model image `h(p) = (p^2, ..., p^{n+1}) / (p^1 + 1)`.
    pub fn to_ball(&self) -> BPoint {
        let denom = self.0[0] + 1.0;
        let b = DVector::from_fn(self.dim(), |j, _| self.0[j + 1] / denom);
        BPoint(b)
    }
}

/// A point of the open Poincaré unit ball in R^n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BPoint(DVector<f64>);

impl BPoint {
    pub fn new(coords: DVector<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidPoint("ball point needs >= 1 coordinate".into()));
        }
        let norm = coords.norm();
        if norm >= 1.0 {
            return Err(Error::OutsideBall { norm });
        }
        Ok(BPoint(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.0
    }

    /// Inverse isometry onto the hyperboloid:
    /// `h^{-1}(b) = ((1 + |b|^2), 2 b) / (1 - |b|^2)`.
    pub fn to_hyperboloid(&self) -> HPoint {
        let r2 = self.0.norm_squared();
        let denom = 1.0 - r2;
        let mut c = DVector::zeros(self.0.len() + 1);
        c[0] = (1.0 + r2) / denom;
        for j in 0..self.0.len() {
            c[j + 1] = 2.0 * self.0[j] / denom;
        }
        // The algebraic image satisfies <c,c>_M = -1 identically; project to
        // clear floating-point residue.
        HPoint::project(c).expect("ball image is timelike by construction")
    }
}

/// Convenience free functions mirroring the two directions of the isometry.
pub fn to_ball(p: &HPoint) -> BPoint {
    p.to_ball()
}

pub fn from_ball(b: &BPoint) -> HPoint {
    b.to_hyperboloid()
}
