//! Sample (beta, xi)-quantiles by Riemannian gradient descent.
//!
//! The loss of a candidate p against an observation x is
//!
//! `rho(x, p) = d(p, x) + beta * d(p, x) * cos angle_p(x, xi)
//!            = |log_p(x)| + <beta xi_p, log_p(x)>`
//!
//! with beta in [0, 1) and xi an ideal boundary point; beta = 0 recovers the
//! geometric median. The sample quantile minimizes the mean of rho over the
//! dataset. Convergence is certified through the first-order condition: the
//! Riemannian norm of the mean of the gradient field psi at the result is
//! below `grad_tol` (psi extends the gradient by `-beta xi_p` at coincident
//! points, where the distance term has no derivative but its contribution
//! averages out).

mod descent;
mod loss;

pub use descent::{frechet_mean, frechet_median, sample_quantile};
pub use loss::{grad_rho, loss_rho, mean_psi, psi};

pub(crate) use loss::COINCIDENT_DIST;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryDir, Curvature, HPoint};

/// What to optimize: direction weight `beta`, boundary target `xi`, and the
/// curvature of the model space the data is interpreted in.
#[derive(Debug, Clone)]
pub struct QuantileSpec {
    beta: f64,
    xi: BoundaryDir,
    curvature: Curvature,
}

impl QuantileSpec {
    pub fn new(beta: f64, xi: BoundaryDir, curvature: Curvature) -> Result<Self> {
        if !beta.is_finite() || !(0.0..1.0).contains(&beta) {
            return Err(Error::InvalidBeta(beta));
        }
        Ok(QuantileSpec { beta, xi, curvature })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn xi(&self) -> &BoundaryDir {
        &self.xi
    }

    pub fn curvature(&self) -> Curvature {
        self.curvature
    }
}

/// A nonempty set of hyperboloid points of equal dimension, with optional
/// per-point labels.
#[derive(Debug, Clone)]
pub struct Dataset {
    points: Vec<HPoint>,
    labels: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(points: Vec<HPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let n1 = points[0].coords().len();
        for p in &points {
            if p.coords().len() != n1 {
                return Err(Error::DimensionMismatch {
                    expected: n1,
                    found: p.coords().len(),
                });
            }
        }
        Ok(Dataset { points, labels: None })
    }

    pub fn with_labels(points: Vec<HPoint>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != points.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                found: labels.len(),
            });
        }
        let mut d = Self::new(points)?;
        d.labels = Some(labels);
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires at least one point
    }

    /// Manifold dimension of the points.
    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn points(&self) -> &[HPoint] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &HPoint {
        &self.points[i]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }
}

/// Where the descent starts.
#[derive(Debug, Clone, Default)]
pub enum InitStrategy {
    /// Start at the medoid (dataset point with the smallest summed distance,
    /// first index on ties); for beta > 0, first run a beta = 0 descent from
    /// there and warm-start the target problem at the median.
    #[default]
    MedianStart,
    /// Start at the dataset point with this index.
    DataPoint(usize),
    /// Start at an explicit point.
    Explicit(HPoint),
}

/// Descent controls. The defaults match the step rule the solver is
/// specified with: initial step 0.5, halving line search, certificate
/// tolerance 1e-8, at most 10^4 accepted iterations.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub alpha0: f64,
    pub shrink: f64,
    pub grad_tol: f64,
    pub max_iter: usize,
    pub init: InitStrategy,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            alpha0: 0.5,
            shrink: 0.5,
            grad_tol: 1e-8,
            max_iter: 10_000,
            init: InitStrategy::MedianStart,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha0.is_finite() && self.alpha0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha0 must be positive, got {}",
                self.alpha0
            )));
        }
        if !(self.shrink.is_finite() && self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "shrink must lie in (0, 1), got {}",
                self.shrink
            )));
        }
        if !(self.grad_tol.is_finite() && self.grad_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "grad_tol must be positive, got {}",
                self.grad_tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be >= 1".into()));
        }
        Ok(())
    }
}

/// Outcome of a descent run. `converged == false` is an honest report, never
/// a silent success; `grad_norm` is the Riemannian (curvature-aware) norm of
/// the mean psi field at `point`, and `loss` the mean rho there.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveResult {
    pub point: HPoint,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub loss: f64,
}
