//! Iso-quantile contours: the quantile points of a fixed level swept over a
//! direction set.

use serde::{Deserialize, Serialize};

use crate::analysis::DirectionSet;
use crate::error::Result;
use crate::geometry::{BoundaryDir, HPoint};
use crate::solver::{
    frechet_median, sample_quantile, Dataset, InitStrategy, QuantileSpec, SolveResult,
    SolverConfig,
};

/// One solved direction of a contour.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContourPoint {
    pub dir_index: usize,
    pub point: HPoint,
    pub loss: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// A full sweep: `points[k]` minimizes the level-`beta` loss toward
/// `dirs.dir(k)`. Directions that failed to certify within the iteration
/// budget stay in the sweep but are flagged, so callers can distinguish a
/// partial contour from a converged one.
#[derive(Debug, Clone)]
pub struct Contour {
    pub beta: f64,
    pub dirs: DirectionSet,
    pub median: SolveResult,
    pub points: Vec<ContourPoint>,
}

impl Contour {
    pub fn fully_converged(&self) -> bool {
        self.median.converged && self.points.iter().all(|c| c.converged)
    }

    pub fn failed_directions(&self) -> Vec<usize> {
        self.points
            .iter()
            .filter(|c| !c.converged)
            .map(|c| c.dir_index)
            .collect()
    }

    /// The contour as (ideal endpoint, quantile) pairs in direction order.
    pub fn quantiles(&self) -> impl Iterator<Item = (BoundaryDir, &HPoint)> + '_ {
        self.points
            .iter()
            .enumerate()
            .map(|(k, c)| (self.dirs.boundary_dir(k), &c.point))
    }
}

/// Sweeps the (`beta`, xi)-quantile over `dirs`, one solve per direction.
///
/// The geometric median of `data` is solved once (under `cfg`) and used as the
/// warm start for every direction, which is the median-start strategy hoisted
/// out of the per-direction loop; results are identical to solving each
/// direction independently with the median start and the sweep is
/// deterministic in direction order. Directions are taken exactly as given —
/// anchor them where you mean them (see [`DirectionSet::transported_to`]).
pub fn isoquantile_contour(
    data: &Dataset,
    beta: f64,
    dirs: &DirectionSet,
    cfg: &SolverConfig,
) -> Result<Contour> {
    let median = frechet_median(data, cfg)?;
    contour_from_median(data, beta, dirs, &median, cfg)
}

/// The contour sweep with the median solve already in hand; used by the
/// pipeline stages that need the median first to anchor the directions.
pub(crate) fn contour_from_median(
    data: &Dataset,
    beta: f64,
    dirs: &DirectionSet,
    median: &SolveResult,
    cfg: &SolverConfig,
) -> Result<Contour> {
    let mut warm = cfg.clone();
    warm.init = InitStrategy::Explicit(median.point.clone());
    let mut points = Vec::with_capacity(dirs.len());
    for k in 0..dirs.len() {
        let spec = QuantileSpec::new(beta, dirs.boundary_dir(k), Default::default())?;
        let sol = sample_quantile(data, &spec, &warm)?;
        points.push(ContourPoint {
            dir_index: k,
            point: sol.point,
            loss: sol.loss,
            grad_norm: sol.grad_norm,
            iterations: sol.iterations,
            converged: sol.converged,
        });
    }
    Ok(Contour {
        beta,
        dirs: dirs.clone(),
        median: median.clone(),
        points,
    })
}
