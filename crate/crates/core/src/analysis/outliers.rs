//! Outlier flagging against iso-quantile contours, in reframed coordinates.
//!
//! Both rules transform the sample by a [`TRFrame`], draw a contour around
//! the transformed median, and flag points radially: the *extreme* rule flags
//! whatever falls outside a high-level contour (default level 0.98); the
//! *fence* rule dilates the central 0.5-level contour fourfold along
//! geodesics through the median and flags points beyond the dilated fence.
//! Between contour vertices the decision radius is interpolated linearly in
//! angle. Planar (n = 2) only.

use crate::analysis::{contour_from_median, Contour, DirectionSet, TRFrame};
use crate::error::{Error, Result};
use crate::geometry::{exp_map, log_map, tangent_basis, HPoint};
use crate::solver::{frechet_median, Dataset, SolverConfig};

/// Contour level defining the extreme-value rule.
pub const DEFAULT_EXTREME_BETA: f64 = 0.98;
/// Contour level the fence rule dilates.
pub const FENCE_BETA: f64 = 0.5;
/// Geodesic dilation factor of the fence.
pub const FENCE_FACTOR: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutlierMethod {
    /// Outside the level-`beta0` contour.
    Extreme { beta0: f64 },
    /// Outside the fourfold geodesic dilation of the level-0.5 contour.
    Fence,
}

#[derive(Debug, Clone)]
pub struct OutlierReport {
    pub method: OutlierMethod,
    /// One flag per data point, in dataset order.
    pub flags: Vec<bool>,
    /// Radial coordinate of each (transformed) point about the transformed
    /// median, and the decision radius at its angle, in dataset order.
    pub radius: Vec<f64>,
    pub threshold: Vec<f64>,
    /// The sweep behind the rule, in transformed coordinates.
    pub contour: Contour,
    /// The decision boundary mapped back to the original coordinates, one
    /// vertex per direction, sorted by transformed angle (a closed polyline
    /// once the first vertex is repeated).
    pub boundary: Vec<HPoint>,
}

/// Piecewise-linear-in-angle radius of a closed contour given as (angle,
/// radius) vertices sorted by angle in (-pi, pi]; wraps around the cut.
fn radial_interp(sorted: &[(f64, f64)], th: f64) -> f64 {
    let k = sorted.len();
    let idx = sorted.partition_point(|&(a, _)| a <= th);
    let ((a0, r0), (a1, r1)) = if idx == 0 {
        (
            (sorted[k - 1].0 - std::f64::consts::TAU, sorted[k - 1].1),
            sorted[0],
        )
    } else if idx == k {
        (
            sorted[k - 1],
            (sorted[0].0 + std::f64::consts::TAU, sorted[0].1),
        )
    } else {
        (sorted[idx - 1], sorted[idx])
    };
    let span = a1 - a0;
    if span < 1e-15 {
        return 0.5 * (r0 + r1);
    }
    let t = (th - a0) / span;
    r0 + t * (r1 - r0)
}

fn flag_against_contour(
    data: &Dataset,
    frame: &TRFrame,
    dirs: &DirectionSet,
    beta: f64,
    factor: f64,
    method: OutlierMethod,
    cfg: &SolverConfig,
) -> Result<OutlierReport> {
    if data.dim() != 2 {
        return Err(Error::InvalidParameter(
            "outlier rules are defined for planar data".into(),
        ));
    }
    let tdata = frame.transform_dataset(data);
    let median = frechet_median(&tdata, cfg)?;
    if !median.converged {
        return Err(Error::NoConvergence(
            "median of the transformed sample did not certify".into(),
        ));
    }
    let dirs_m = dirs.transported_to(&median.point);
    let contour = contour_from_median(&tdata, beta, &dirs_m, &median, cfg)?;
    if !contour.fully_converged() {
        return Err(Error::UnconvergedDirections {
            beta,
            directions: contour.failed_directions(),
        });
    }

    let m = &median.point;
    let basis = tangent_basis(m);
    let polar = |x: &HPoint| {
        let v = log_map(m, x);
        let y = v.basis_coords(&basis);
        (y[1].atan2(y[0]), v.norm())
    };

    let mut vertices: Vec<(usize, f64, f64)> = contour
        .points
        .iter()
        .map(|c| {
            let (th, r) = polar(&c.point);
            (c.dir_index, th, r)
        })
        .collect();
    vertices.sort_by(|a, b| a.1.total_cmp(&b.1));
    let sorted: Vec<(f64, f64)> = vertices.iter().map(|&(_, th, r)| (th, r)).collect();

    let mut flags = Vec::with_capacity(data.len());
    let mut radius = Vec::with_capacity(data.len());
    let mut threshold = Vec::with_capacity(data.len());
    for x in tdata.points() {
        let (th, r) = polar(x);
        let cut = factor * radial_interp(&sorted, th);
        flags.push(r > cut);
        radius.push(r);
        threshold.push(cut);
    }

    // Decision boundary in the original coordinates: dilate each vertex along
    // its geodesic through the transformed median, then undo the reframing.
    let boundary = vertices
        .iter()
        .map(|&(k, _, _)| {
            let q = &contour.points[k].point;
            let stretched = if factor == 1.0 {
                q.clone()
            } else {
                exp_map(m, &log_map(m, q).scale(factor))
            };
            frame.retransform_point(&stretched)
        })
        .collect();

    Ok(OutlierReport {
        method,
        flags,
        radius,
        threshold,
        contour,
        boundary,
    })
}

/// Flags points outside the level-`beta0` contour of the reframed sample.
pub fn outliers_extreme(
    data: &Dataset,
    frame: &TRFrame,
    dirs: &DirectionSet,
    beta0: f64,
    cfg: &SolverConfig,
) -> Result<OutlierReport> {
    if !(0.0 < beta0 && beta0 < 1.0) {
        return Err(Error::InvalidBeta(beta0));
    }
    flag_against_contour(
        data,
        frame,
        dirs,
        beta0,
        1.0,
        OutlierMethod::Extreme { beta0 },
        cfg,
    )
}

/// Flags points outside the fourfold geodesic dilation of the level-0.5
/// contour of the reframed sample.
pub fn outliers_fence(
    data: &Dataset,
    frame: &TRFrame,
    dirs: &DirectionSet,
    cfg: &SolverConfig,
) -> Result<OutlierReport> {
    flag_against_contour(
        data,
        frame,
        dirs,
        FENCE_BETA,
        FENCE_FACTOR,
        OutlierMethod::Fence,
        cfg,
    )
}
