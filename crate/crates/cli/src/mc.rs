//! Monte Carlo harness for the consistency and root-N stability checks.
//!
//! Per repetition one oversized sample (`ref_multiplier * max(sizes)` points,
//! centering off so prefixes stay i.i.d.) is generated; the estimate at size
//! `N` solves on the `N`-prefix. Consistency compares each prefix estimate
//! against the full-sample estimate of its own repetition; stability measures
//! the spread of `sqrt(N)`-scaled tangent coordinates of the prefix estimates
//! around a fixed reference computed from a separate oversized sample.

use hyperq::datagen::{generate, Family, GenSpec};
use hyperq::{
    dist, log_map, sample_quantile, tangent_basis, BoundaryDir, Curvature, Dataset, HPoint,
    QuantileSpec, SolverConfig, TangentVec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::{ConsistencySection, McReport, StabilitySection};
use crate::{CliError, SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McMode {
    Both,
    Consistency,
    Stability,
}

#[derive(Debug, Clone)]
pub struct McParams {
    pub family: Family,
    pub nu: u8,
    pub beta: f64,
    pub xi_angle: f64,
    pub sizes: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub mode: McMode,
    pub ref_multiplier: usize,
    pub cfg: SolverConfig,
}

fn solve_prefix(
    points: &[HPoint],
    n: usize,
    beta: f64,
    xi_angle: f64,
    cfg: &SolverConfig,
) -> Result<HPoint, CliError> {
    let data = Dataset::new(points[..n].to_vec())?;
    let sol = if beta == 0.0 {
        hyperq::frechet_median(&data, cfg)?
    } else {
        let o = HPoint::origin(2);
        let basis = tangent_basis(&o);
        let dir = basis[0]
            .scale(xi_angle.cos())
            .add(&basis[1].scale(xi_angle.sin()));
        let xi = BoundaryDir::new(o, dir)?;
        let spec = QuantileSpec::new(beta, xi, Curvature::default())?;
        sample_quantile(&data, &spec, cfg)?
    };
    if !sol.converged {
        return Err(CliError::NonConvergence(serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "error": "non-convergence",
            "detail": format!("monte carlo solve at N={n} did not certify"),
            "grad_norm": sol.grad_norm,
            "iterations": sol.iterations,
        })));
    }
    Ok(sol.point)
}

pub fn run_montecarlo(p: &McParams) -> Result<McReport, CliError> {
    if p.sizes.is_empty() {
        return Err(CliError::Input("--sizes must be non-empty".into()));
    }
    if p.sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Input("--sizes must be strictly increasing".into()));
    }
    if p.reps < 2 {
        return Err(CliError::Input("--reps must be at least 2".into()));
    }
    if p.ref_multiplier < 2 {
        return Err(CliError::Input("--ref-mult must be at least 2".into()));
    }
    let n_max = *p.sizes.last().expect("non-empty");
    let n_full = p.ref_multiplier * n_max;

    let mut seeder = ChaCha8Rng::seed_from_u64(p.seed);
    let ref_seed: u64 = seeder.gen();
    let rep_seeds: Vec<u64> = (0..p.reps).map(|_| seeder.gen()).collect();

    let gen_sample = |seed: u64| -> Result<Vec<HPoint>, CliError> {
        let spec = GenSpec::new(p.family, p.nu, seed)?
            .with_n_points(n_full)
            .with_centering(false);
        Ok(generate(&spec)?.points().to_vec())
    };

    // Fixed reference for the stability section, from its own sample.
    let (q_ref, ref_basis): (Option<HPoint>, Option<Vec<TangentVec>>) =
        if p.mode != McMode::Consistency {
            let pts = gen_sample(ref_seed)?;
            let q = solve_prefix(&pts, pts.len(), p.beta, p.xi_angle, &p.cfg)?;
            let basis = tangent_basis(&q);
            (Some(q), Some(basis))
        } else {
            (None, None)
        };

    let mut errors: Vec<Vec<f64>> = vec![Vec::with_capacity(p.reps); p.sizes.len()];
    let mut coords: Vec<Vec<[f64; 2]>> = vec![Vec::with_capacity(p.reps); p.sizes.len()];
    for &rs in &rep_seeds {
        let pts = gen_sample(rs)?;
        let q_full = if p.mode != McMode::Stability {
            Some(solve_prefix(&pts, n_full, p.beta, p.xi_angle, &p.cfg)?)
        } else {
            None
        };
        for (si, &n) in p.sizes.iter().enumerate() {
            let q_n = solve_prefix(&pts, n, p.beta, p.xi_angle, &p.cfg)?;
            if let Some(qf) = &q_full {
                errors[si].push(dist(&q_n, qf));
            }
            if let (Some(qr), Some(basis)) = (&q_ref, &ref_basis) {
                let v = log_map(qr, &q_n);
                let c = v.basis_coords(basis);
                coords[si].push([c[0], c[1]]);
            }
        }
    }

    let consistency = (p.mode != McMode::Stability).then(|| {
        let medians: Vec<f64> = errors.iter().map(|errs| median(errs)).collect();
        let strictly_decreasing = medians.windows(2).all(|w| w[1] < w[0]);
        ConsistencySection {
            ref_multiplier: p.ref_multiplier,
            error_medians: medians,
            strictly_decreasing,
        }
    });

    let stability = (p.mode != McMode::Consistency).then(|| {
        let scaled_sd: Vec<f64> = p
            .sizes
            .iter()
            .zip(&coords)
            .map(|(&n, cs)| {
                let scale = (n as f64).sqrt();
                let var = (0..2)
                    .map(|k| {
                        let vals: Vec<f64> = cs.iter().map(|c| scale * c[k]).collect();
                        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
                        vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                            / (vals.len() - 1) as f64
                    })
                    .sum::<f64>()
                    / 2.0;
                var.sqrt()
            })
            .collect();
        let max = scaled_sd.iter().cloned().fold(f64::MIN, f64::max);
        let min = scaled_sd.iter().cloned().fold(f64::MAX, f64::min);
        StabilitySection {
            scaled_sd,
            max_over_min: max / min,
        }
    });

    Ok(McReport {
        schema_version: SCHEMA_VERSION,
        command: "montecarlo",
        family: p.family.name().to_string(),
        nu: p.nu,
        beta: p.beta,
        xi_angle: p.xi_angle,
        sizes: p.sizes.clone(),
        reps: p.reps,
        seed: p.seed,
        consistency,
        stability,
    })
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}
