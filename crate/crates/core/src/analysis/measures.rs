//! Scalar summaries of distributional shape read off iso-quantile contours:
//! spread, asymmetry, tail weight, and eccentricity.

use crate::analysis::{contour_from_median, Contour, DirectionSet};
use crate::error::{Error, Result};
use crate::geometry::{log_map, mink_dot, HPoint, TangentVec};
use crate::solver::{frechet_median, Dataset, SolverConfig};

/// Lower contour level entering the tail-weight ratios.
pub const DEFAULT_KAPPA_LO: f64 = 0.2;

/// The seven contour-based measures at level `beta`, with tail ratios taken
/// between levels `kappa_lo` and `beta_hi`.
///
/// With `q(v)` the level-`beta` quantile toward direction `v` and logs taken
/// at the median `m`:
///
/// * `delta1`, `delta2`: max and mean over directions of
///   `|log q(v) - log q(-v)|` (antipodal spread);
/// * `gamma1`: max over directions of `|log q(v) + log q(-v)|`, relative to
///   `delta1`; `gamma2`: the mean of `log q(v)` over all directions, relative
///   to `delta2` (a tangent vector at `m`; its norm is the scalar summary);
/// * `kappa1`, `kappa2`: the same spreads at level `beta_hi` divided by those
///   at `kappa_lo`;
/// * `alpha`: log of the ratio of the largest to smallest contour radius at
///   level `beta`.
///
/// Degenerate samples (e.g. a point mass) make some denominators vanish; the
/// affected measures are reported as 0 and `degenerate` is set.
#[derive(Debug, Clone)]
pub struct MeasuresReport {
    pub beta: f64,
    pub beta_hi: f64,
    pub kappa_lo: f64,
    pub k: usize,
    pub delta1: f64,
    pub delta2: f64,
    pub gamma1: f64,
    pub gamma2: TangentVec,
    pub gamma2_norm: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub alpha: f64,
    pub degenerate: bool,
    pub median: HPoint,
}

fn tangent_norm(v: &nalgebra::DVector<f64>) -> f64 {
    mink_dot(v.as_slice(), v.as_slice()).max(0.0).sqrt()
}

/// Antipodal max/mean spreads of a contour's log vectors.
fn spreads(logs: &[TangentVec], dirs: &DirectionSet) -> (f64, f64) {
    let k = logs.len();
    let (mut max, mut sum) = (0.0f64, 0.0f64);
    for i in 0..k {
        let diff = logs[i].vec() - logs[dirs.antipode(i)].vec();
        let nrm = tangent_norm(&diff);
        max = max.max(nrm);
        sum += nrm;
    }
    (max, sum / k as f64)
}

fn solved_logs(contour: &Contour, m: &HPoint) -> Vec<TangentVec> {
    contour.points.iter().map(|c| log_map(m, &c.point)).collect()
}

/// [`measures_with_kappa_lo`] at the default lower tail level 0.2.
pub fn measures(
    data: &Dataset,
    beta: f64,
    beta_hi: f64,
    dirs: &DirectionSet,
    cfg: &SolverConfig,
) -> Result<MeasuresReport> {
    measures_with_kappa_lo(data, beta, beta_hi, DEFAULT_KAPPA_LO, dirs, cfg)
}

/// Computes the seven measures. Needs `0 < beta <= beta_hi < 1` and
/// `0 < kappa_lo < beta_hi`; `beta` may equal `beta_hi` (the tail ratios then
/// compare `beta_hi` against `kappa_lo` while the spreads sit at the same
/// level). Directions are re-anchored at the sample median by parallel
/// transport before the sweeps. Every direction of every needed contour must
/// certify, otherwise the offending level and directions are returned in the
/// error.
pub fn measures_with_kappa_lo(
    data: &Dataset,
    beta: f64,
    beta_hi: f64,
    kappa_lo: f64,
    dirs: &DirectionSet,
    cfg: &SolverConfig,
) -> Result<MeasuresReport> {
    if !(0.0 < beta && beta < 1.0) {
        return Err(Error::InvalidBeta(beta));
    }
    if !(0.0 < beta_hi && beta_hi < 1.0) {
        return Err(Error::InvalidBeta(beta_hi));
    }
    if beta > beta_hi {
        return Err(Error::InvalidParameter(format!(
            "measure level {beta} exceeds upper tail level {beta_hi}"
        )));
    }
    if !(0.0 < kappa_lo && kappa_lo < beta_hi) {
        return Err(Error::InvalidParameter(format!(
            "lower tail level {kappa_lo} must sit in (0, {beta_hi})"
        )));
    }

    let median = frechet_median(data, cfg)?;
    if !median.converged {
        return Err(Error::NoConvergence(
            "median did not certify within the iteration budget".into(),
        ));
    }
    let m = median.point.clone();
    let dirs_m = dirs.transported_to(&m);

    // One sweep per distinct level, shared between the measures.
    let mut levels = vec![beta, kappa_lo, beta_hi];
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut sweeps: Vec<(f64, Contour)> = Vec::with_capacity(levels.len());
    for &level in &levels {
        let c = contour_from_median(data, level, &dirs_m, &median, cfg)?;
        if !c.fully_converged() {
            return Err(Error::UnconvergedDirections {
                beta: level,
                directions: c.failed_directions(),
            });
        }
        sweeps.push((level, c));
    }
    let sweep = |level: f64| &sweeps.iter().find(|(l, _)| *l == level).unwrap().1;

    let logs = solved_logs(sweep(beta), &m);
    let (delta1, delta2) = spreads(&logs, &dirs_m);

    let mut degenerate = false;
    let k = dirs_m.len();

    let gamma1 = if delta1 > 0.0 {
        let mut max = 0.0f64;
        for i in 0..k {
            let sum = logs[i].vec() + logs[dirs_m.antipode(i)].vec();
            max = max.max(tangent_norm(&sum));
        }
        max / delta1
    } else {
        degenerate = true;
        0.0
    };

    let mut mean_log = logs[0].vec().clone();
    for l in logs.iter().skip(1) {
        mean_log += l.vec();
    }
    mean_log /= k as f64;
    let gamma2 = if delta2 > 0.0 {
        TangentVec::new(m.clone(), mean_log / delta2)?
    } else {
        degenerate = true;
        TangentVec::zero(m.clone())
    };
    let gamma2_norm = gamma2.norm();

    let (lo1, lo2) = spreads(&solved_logs(sweep(kappa_lo), &m), &dirs_m);
    let (hi1, hi2) = spreads(&solved_logs(sweep(beta_hi), &m), &dirs_m);
    let kappa1 = if lo1 > 0.0 {
        hi1 / lo1
    } else {
        degenerate = true;
        0.0
    };
    let kappa2 = if lo2 > 0.0 {
        hi2 / lo2
    } else {
        degenerate = true;
        0.0
    };

    let radii: Vec<f64> = logs.iter().map(|v| v.norm()).collect();
    let r_max = radii.iter().cloned().fold(0.0f64, f64::max);
    let r_min = radii.iter().cloned().fold(f64::INFINITY, f64::min);
    let alpha = if r_min > 0.0 {
        (r_max / r_min).ln()
    } else {
        degenerate = true;
        0.0
    };

    Ok(MeasuresReport {
        beta,
        beta_hi,
        kappa_lo,
        k,
        delta1,
        delta2,
        gamma1,
        gamma2,
        gamma2_norm,
        kappa1,
        kappa2,
        alpha,
        degenerate,
        median: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{exp_map, tangent_basis};

    fn ring(n: usize, r: f64) -> Dataset {
        let o = HPoint::origin(2);
        let basis = tangent_basis(&o);
        let pts = (0..n)
            .map(|i| {
                let th = std::f64::consts::TAU * i as f64 / n as f64;
                let v = basis[0].scale(r * th.cos()).add(&basis[1].scale(r * th.sin()));
                exp_map(&o, &v)
            })
            .collect();
        Dataset::new(pts).unwrap()
    }

    #[test]
    fn symmetric_ring_has_tiny_asymmetry_and_eccentricity() {
        let data = ring(16, 0.9);
        let dirs = DirectionSet::canonical(&HPoint::origin(2), 16).unwrap();
        let rep = measures(&data, 0.5, 0.8, &dirs, &SolverConfig::default()).unwrap();
        assert!(!rep.degenerate);
        assert!(rep.delta1 > 0.1);
        assert!(rep.delta2 > 0.1 && rep.delta2 <= rep.delta1 + 1e-15);
        assert!(rep.gamma1 < 1e-4, "gamma1 {}", rep.gamma1);
        assert!(rep.gamma2_norm < 1e-4, "gamma2 {}", rep.gamma2_norm);
        assert!(rep.alpha < 1e-4, "alpha {}", rep.alpha);
        // Contours grow with the level, so tail ratios exceed one.
        assert!(rep.kappa1 > 1.0 && rep.kappa2 > 1.0);
    }

    #[test]
    fn shifted_cluster_shows_up_in_gamma2() {
        // A ring plus a heavy one-sided cluster breaks antipodal balance.
        let o = HPoint::origin(2);
        let basis = tangent_basis(&o);
        let mut pts = ring(10, 0.5).points().to_vec();
        for i in 0..6 {
            let v = basis[0].scale(1.8 + 0.05 * i as f64);
            pts.push(exp_map(&o, &v));
        }
        let data = Dataset::new(pts).unwrap();
        let dirs = DirectionSet::canonical(&HPoint::origin(2), 12).unwrap();
        let rep = measures(&data, 0.6, 0.8, &dirs, &SolverConfig::default()).unwrap();
        assert!(rep.gamma2_norm > 0.05, "gamma2 {}", rep.gamma2_norm);
        assert!(rep.gamma1 > 0.05);
    }

    #[test]
    fn point_mass_degenerates_to_zeros() {
        let p = HPoint::origin(2);
        let data = Dataset::new(vec![p.clone(), p.clone(), p.clone()]).unwrap();
        let dirs = DirectionSet::canonical(&p, 8).unwrap();
        let rep = measures(&data, 0.5, 0.8, &dirs, &SolverConfig::default()).unwrap();
        assert!(rep.degenerate);
        assert_eq!(rep.delta1, 0.0);
        assert_eq!(rep.delta2, 0.0);
        assert_eq!(rep.gamma1, 0.0);
        assert_eq!(rep.gamma2_norm, 0.0);
        assert_eq!(rep.kappa1, 0.0);
        assert_eq!(rep.kappa2, 0.0);
        assert_eq!(rep.alpha, 0.0);
    }

    #[test]
    fn level_ordering_is_validated() {
        let data = ring(8, 0.5);
        let dirs = DirectionSet::canonical(&HPoint::origin(2), 4).unwrap();
        let cfg = SolverConfig::default();
        assert!(measures(&data, 0.9, 0.8, &dirs, &cfg).is_err());
        assert!(measures(&data, 0.0, 0.8, &dirs, &cfg).is_err());
        assert!(measures_with_kappa_lo(&data, 0.5, 0.8, 0.9, &dirs, &cfg).is_err());
        // Equal spread and upper-tail levels are allowed.
        assert!(measures(&data, 0.8, 0.8, &dirs, &cfg).is_ok());
    }
}
