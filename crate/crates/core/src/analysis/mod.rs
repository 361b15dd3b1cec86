//! Contour-level machinery built on the quantile solver: direction sets,
//! iso-quantile contours, tangent reframing, outlier rules, shape measures,
//! and tangent ranks.
//!
//! The pipeline functions in this module anchor caller-supplied direction
//! sets themselves: directions are parallel-transported along the single
//! geodesic from their center to whatever working center the operation
//! computes (the sample median, or the median of the reframed sample).
//! Construct canonical sets at the origin and let the pipeline carry them.

mod contour;
mod directions;
mod frame;
mod measures;
mod outliers;
mod rank;

pub use contour::{isoquantile_contour, Contour, ContourPoint};
pub use directions::{DirectionSet, DEFAULT_K};
pub use frame::{select_tr_frame, TRFrame, FRAME_SEARCH_CAP};
pub use measures::{measures, measures_with_kappa_lo, MeasuresReport, DEFAULT_KAPPA_LO};
pub use outliers::{
    outliers_extreme, outliers_fence, OutlierMethod, OutlierReport, DEFAULT_EXTREME_BETA,
    FENCE_BETA, FENCE_FACTOR,
};
pub use rank::tangent_rank;

pub(crate) use contour::contour_from_median;

use crate::error::Result;
use crate::solver::{Dataset, SolverConfig};

/// A contour sweep in reframed coordinates: transforms the sample by `frame`,
/// sweeps the level-`beta` contour about the transformed median (directions
/// re-anchored there by parallel transport), and maps the solved points back
/// through the inverse frame. The returned contour's `points` are in the
/// original coordinates; its `median` is the transformed-sample median mapped
/// back as well. With an identity frame this is exactly the plain sweep.
pub fn tr_contour(
    data: &Dataset,
    beta: f64,
    frame: &TRFrame,
    dirs: &DirectionSet,
    cfg: &SolverConfig,
) -> Result<Contour> {
    let tdata = frame.transform_dataset(data);
    let median = crate::solver::frechet_median(&tdata, cfg)?;
    let dirs_m = dirs.transported_to(&median.point);
    let mut swept = contour_from_median(&tdata, beta, &dirs_m, &median, cfg)?;
    if !frame.is_identity() {
        for cp in &mut swept.points {
            cp.point = frame.retransform_point(&cp.point);
        }
        swept.median.point = frame.retransform_point(&swept.median.point);
    }
    Ok(swept)
}
