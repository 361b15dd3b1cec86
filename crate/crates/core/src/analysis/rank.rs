//! The tangent rank of a point: how deep it sits inside a sample.

use crate::error::{Error, Result};
use crate::geometry::{log_map, HPoint, TangentVec};
use crate::solver::{Dataset, COINCIDENT_DIST};

/// Mean of the unit tangents from `p` toward each sample point.
///
/// Its norm lies in [0, 1]: it vanishes exactly when `p` is the geometric
/// median of the sample, and `p` is a level-`beta` quantile point for the
/// returned direction when the norm equals `beta`, so the norm acts as a
/// centrality rank (0 deepest, ~1 at the fringe). Sample points coinciding
/// with `p` contribute the zero vector, the minimal-norm subgradient choice;
/// if every point coincides with `p` the direction is undefined.
pub fn tangent_rank(data: &Dataset, p: &HPoint) -> Result<TangentVec> {
    if data.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: data.dim(),
        });
    }
    let mut mean = TangentVec::zero(p.clone());
    let mut distinct = 0usize;
    for x in data.points() {
        let v = log_map(p, x);
        let nrm = v.norm();
        // Same coincidence convention as the loss: atoms at p take the
        // minimal-norm subgradient, i.e. contribute zero.
        if nrm < COINCIDENT_DIST {
            continue;
        }
        mean = mean.add(&v.scale(1.0 / nrm));
        distinct += 1;
    }
    if distinct == 0 {
        return Err(Error::DegenerateRank);
    }
    Ok(mean.scale(1.0 / data.len() as f64))
}
