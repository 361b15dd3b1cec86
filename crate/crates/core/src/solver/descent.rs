//! The shared descent loop and the three entry points built on it.

use super::loss::{flatten_points, MeanObjective, Objective, QuantileObjective};
use super::{Dataset, InitStrategy, QuantileSpec, SolveResult, SolverConfig};
use crate::error::{Error, Result};
use crate::geometry::{dist_raw, exp_raw, mink_dot, mink_norm_sq, HPoint};
use nalgebra::{DMatrix, DVector};

const MAX_BACKTRACK: usize = 100;

/// A plateau step must shrink the gradient norm by at least this relative
/// factor; accepting rounding-level fluctuations would turn the endgame
/// into a bounded random walk.
const PLATEAU_MARGIN: f64 = 1.0 - 1e-12;

/// First-order iterations tolerated without a 0.1% improvement of the best
/// gradient norm before the loop hands over to the Newton polish. Progress
/// that slow means the iterate is zigzagging across an ill-conditioned
/// valley, where second-order steps are the only practical way down.
const STALL_PATIENCE: usize = 50;

/// Budget slice (capped at a quarter of `max_iter`) withheld from the
/// first-order loop so the Newton polish can still act when steady-but-slow
/// creep exhausts the rest. Sized above `MAX_NEWTON` so the cap never binds
/// before the polish's own step limit does.
const NEWTON_RESERVE: usize = 64;

/// Lifts a near-sheet buffer exactly onto the sheet: the timelike
/// coordinate is recomputed from the spatial part (no cancellation, valid
/// at any radius, unlike a `1/sqrt(-<c,c>_M)` rescale).
#[inline]
fn lift_onto_sheet(out: &mut [f64]) {
    let mut s2 = 0.0;
    for v in &out[1..] {
        s2 += v * v;
    }
    out[0] = (1.0 + s2).sqrt();
}

/// `q <- exp_q(-step * grad)`, normalized back onto the sheet in place.
#[inline]
fn step_onto_sheet(q: &[f64], grad: &[f64], step: f64, vbuf: &mut [f64], out: &mut [f64]) {
    for j in 0..q.len() {
        vbuf[j] = -step * grad[j];
    }
    exp_raw(q, vbuf, out);
    lift_onto_sheet(out);
}

struct RawSolve {
    point: Vec<f64>,
    grad_norm: f64,
    iterations: usize,
    converged: bool,
    loss: f64,
}

/// Projected gradient descent with a halving line search restarted from
/// `alpha0` at every iteration. A step is accepted when it strictly lowers
/// the loss, or — once loss differences fall below floating-point
/// resolution (candidate loss within one rounding band) — when it lowers
/// the gradient norm, which is the certificate quantity itself and keeps
/// the endgame monotone instead of wandering the plateau. If no step of
/// length down to `alpha0 * shrink^MAX_BACKTRACK` achieves either, the loop
/// stops and reports honestly.
///
/// Two certificates can end the loop with `converged = true`: the smooth
/// one (`|mean grad| <= grad_tol`) and, when the iterate has drifted onto a
/// data point, the objective's nonsmooth one (`atom_check`), which snaps
/// onto the atom it certifies. Both report the respective residual as
/// `grad_norm`. When the iterate instead coincides with an atom that fails
/// the certificate, the mean field there is a kink convention rather than a
/// descent direction, so the step restarts from the atom along `-S` (the
/// mean subgradient): the one-sided slope that way is `-resid < -grad_tol`,
/// which guarantees a strictly lower point and escapes the kink.
fn descend<O: Objective>(obj: &mut O, init: &[f64], cfg: &SolverConfig) -> RawSolve {
    let n1 = init.len();
    let mut q = init.to_vec();
    let mut grad = vec![0.0; n1];
    let mut gbuf = vec![0.0; n1];
    let mut vbuf = vec![0.0; n1];
    let mut cand = vec![0.0; n1];
    let mut loss = obj.loss(&q);
    let mut wide = obj.loss_noise();
    let norm_factor = obj.riem_norm_factor();
    let mut iterations = 0usize;
    let mut converged = false;
    let mut grad_norm;
    let mut best_gn = f64::INFINITY;
    let mut stalled = 0usize;
    // Ill-conditioned valleys can keep first-order steps creeping (loss and
    // gradient norm both improving, but geometrically slowly) until the
    // budget is gone, and the polish below cannot move without budget. Hold
    // back a slice of the budget so the second-order endgame always runs.
    let horizon = cfg.max_iter - (cfg.max_iter / 4).min(NEWTON_RESERVE);

    loop {
        obj.mean_grad(&q, &mut grad);
        grad_norm = riem_norm(&grad, norm_factor);
        if grad_norm <= cfg.grad_tol {
            converged = true;
            break;
        }
        let mut at_kink = false;
        if let Some(cert) = obj.atom_check(&q) {
            if cert.resid <= cfg.grad_tol {
                q.copy_from_slice(&cert.atom);
                loss = obj.loss(&q);
                grad_norm = cert.resid.max(0.0);
                converged = true;
                break;
            }
            if cert.coincident {
                at_kink = true;
                q.copy_from_slice(&cert.atom);
                loss = obj.loss(&q);
                wide = obj.loss_noise();
                for (g, s) in grad.iter_mut().zip(&cert.subgrad) {
                    *g = s / norm_factor;
                }
                grad_norm = riem_norm(&grad, norm_factor);
            }
        }
        if !at_kink {
            if grad_norm < best_gn * (1.0 - 1e-3) {
                best_gn = grad_norm;
                stalled = 0;
            } else {
                stalled += 1;
                if stalled >= STALL_PATIENCE {
                    break; // zigzag stall: hand over to the Newton polish
                }
            }
        }
        if iterations >= horizon {
            break;
        }
        // Two loss evaluations closer than the rounding band cannot be
        // ordered; strict-route acceptance moreover parks iterates at local
        // minima of the evaluation-noise field, a few noise widths below
        // their whole neighborhood. Inside the noise window the gradient
        // norm arbitrates instead of the loss. A kink escape is exempt: its
        // slope guarantee makes a strict decrease reachable, and the
        // plateau route could creep back into the coincidence zone.
        let band = 8.0 * f64::EPSILON * loss.abs();
        let window = wide.max(4.0 * band);
        let mut step = cfg.alpha0;
        let mut accepted = false;
        for _ in 0..MAX_BACKTRACK {
            step_onto_sheet(&q, &grad, step, &mut vbuf, &mut cand);
            let cand_loss = obj.loss(&cand);
            if cand_loss < loss - band {
                // A drop beyond the noise window is real progress; it
                // placates the stall detector even while the gradient norm
                // plateaus (a linear valley traversed at constant slope).
                if cand_loss < loss - window {
                    stalled = 0;
                }
                q.copy_from_slice(&cand);
                loss = cand_loss;
                wide = obj.loss_noise();
                accepted = true;
                break;
            }
            if !at_kink && cand_loss <= loss + window {
                obj.mean_grad(&cand, &mut gbuf);
                if riem_norm(&gbuf, norm_factor) < grad_norm * PLATEAU_MARGIN {
                    q.copy_from_slice(&cand);
                    loss = cand_loss;
                    wide = obj.loss_noise();
                    accepted = true;
                    break;
                }
            }
            step *= cfg.shrink;
        }
        if !accepted {
            break; // no admissible step: kink or resolution floor
        }
        iterations += 1;
    }

    if !converged {
        // First-order progress died above the tolerance (ill-conditioned
        // valley, loss resolution floor, or iteration budget); a few
        // second-order steps usually finish the job. Failure keeps the
        // incumbent and reports non-convergence honestly.
        converged = newton_polish(obj, &mut q, &mut grad_norm, &mut iterations, cfg);
        loss = obj.loss(&q);
    }

    RawSolve {
        point: q,
        grad_norm,
        iterations,
        converged,
        loss,
    }
}

/// Orthonormal basis of the tangent space at `q` (unit sheet): ambient
/// spatial axes projected tangentially, then Minkowski Gram–Schmidt. The
/// Gram matrix of the projections is `I + qs qs^T` (qs the spatial part),
/// which is positive definite, so the sweep never degenerates.
fn tangent_basis_raw(q: &[f64]) -> Vec<Vec<f64>> {
    let n1 = q.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n1 - 1);
    for k in 1..n1 {
        let mut v = vec![0.0; n1];
        v[k] = 1.0;
        // Tangential projection: w + <q, w>_M q, with <q, e_k>_M = q[k].
        for j in 0..n1 {
            v[j] += q[k] * q[j];
        }
        for b in &basis {
            let c = mink_dot(&v, b);
            for j in 0..n1 {
                v[j] -= c * b[j];
            }
        }
        let nrm = mink_norm_sq(&v).max(0.0).sqrt();
        for vj in v.iter_mut() {
            *vj /= nrm;
        }
        basis.push(v);
    }
    basis
}

/// Newton iteration on the tangent-space components of the mean gradient,
/// for endgames where first-order steps zigzag: beta near 1 or a far-out
/// minimizer can leave the loss orders of magnitude flatter along the pull
/// direction than across it, and halving line searches then crawl. The
/// Jacobian comes from finite differences of the gradient field along a
/// tangent basis (transport error is O(h) and irrelevant near the zero), a
/// step must lower the measured gradient norm to be kept, and shrinking
/// halves the step. Returns whether the tolerance was reached; `q`,
/// `grad_norm` and `iterations` reflect whatever progress was made.
fn newton_polish<O: Objective>(
    obj: &mut O,
    q: &mut [f64],
    grad_norm: &mut f64,
    iterations: &mut usize,
    cfg: &SolverConfig,
) -> bool {
    const FD_H: f64 = 1e-6;
    const MAX_NEWTON: usize = 60;
    const MAX_STEP: f64 = 2.0;
    let n1 = q.len();
    let n = n1 - 1;
    let norm_factor = obj.riem_norm_factor();
    let mut gbuf = vec![0.0; n1];
    let mut pbuf = vec![0.0; n1];
    let mut vbuf = vec![0.0; n1];
    for _ in 0..MAX_NEWTON {
        obj.mean_grad(q, &mut gbuf);
        let gn = riem_norm(&gbuf, norm_factor);
        if gn.is_finite() {
            *grad_norm = gn;
        } else {
            return false;
        }
        if gn <= cfg.grad_tol {
            return true;
        }
        if *iterations >= cfg.max_iter {
            return false; // the polish spends the same iteration budget
        }
        let basis = tangent_basis_raw(q);
        let mut g0 = DVector::zeros(n);
        for k in 0..n {
            g0[k] = mink_dot(&gbuf, &basis[k]);
        }
        let mut jac = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n1 {
                vbuf[j] = FD_H * basis[i][j];
            }
            exp_raw(q, &vbuf, &mut pbuf);
            lift_onto_sheet(&mut pbuf);
            obj.mean_grad(&pbuf, &mut gbuf);
            for k in 0..n {
                jac[(k, i)] = (mink_dot(&gbuf, &basis[k]) - g0[k]) / FD_H;
            }
        }
        let Some(delta) = jac.lu().solve(&(-&g0)) else {
            return false;
        };
        let dlen = delta.norm();
        if !dlen.is_finite() || dlen == 0.0 {
            return false;
        }
        let mut fac = if dlen > MAX_STEP { MAX_STEP / dlen } else { 1.0 };
        let mut improved = false;
        for _ in 0..30 {
            vbuf.fill(0.0);
            for (i, b) in basis.iter().enumerate() {
                let w = fac * delta[i];
                for j in 0..n1 {
                    vbuf[j] += w * b[j];
                }
            }
            exp_raw(q, &vbuf, &mut pbuf);
            lift_onto_sheet(&mut pbuf);
            obj.mean_grad(&pbuf, &mut gbuf);
            let gn_new = riem_norm(&gbuf, norm_factor);
            if gn_new < gn {
                q.copy_from_slice(&pbuf);
                improved = true;
                break;
            }
            fac *= 0.5;
        }
        if !improved {
            return false;
        }
        *iterations += 1;
    }
    false
}

/// Riemannian norm of an embedding-coordinate gradient; a non-finite
/// gradient must never masquerade as convergence, so NaN maps to infinity.
#[inline]
fn riem_norm(grad: &[f64], norm_factor: f64) -> f64 {
    let g2 = mink_norm_sq(grad);
    if g2.is_finite() {
        g2.max(0.0).sqrt() * norm_factor
    } else {
        f64::INFINITY
    }
}

/// Dataset point with the smallest summed distance to the others (first index
/// on ties).
fn medoid_index(flat: &[f64], n1: usize) -> usize {
    let n_pts = flat.len() / n1;
    let mut best = (f64::INFINITY, 0usize);
    for i in 0..n_pts {
        let pi = &flat[i * n1..(i + 1) * n1];
        let mut sum = 0.0;
        for j in 0..n_pts {
            sum += dist_raw(pi, &flat[j * n1..(j + 1) * n1]);
        }
        if sum < best.0 {
            best = (sum, i);
        }
    }
    best.1
}

fn resolve_init(
    flat: &[f64],
    n1: usize,
    data: &Dataset,
    init: &InitStrategy,
    presolve_beta0: bool,
    cfg: &SolverConfig,
) -> Result<Vec<f64>> {
    match init {
        InitStrategy::MedianStart => {
            let m = medoid_index(flat, n1);
            let start = flat[m * n1..(m + 1) * n1].to_vec();
            if presolve_beta0 {
                let mut obj = QuantileObjective::new(flat, n1, 0.0, Vec::new(), 1.0);
                Ok(descend(&mut obj, &start, cfg).point)
            } else {
                Ok(start)
            }
        }
        InitStrategy::DataPoint(i) => {
            if *i >= data.len() {
                return Err(Error::InvalidParameter(format!(
                    "init data point index {i} out of range (N = {})",
                    data.len()
                )));
            }
            Ok(flat[i * n1..(i + 1) * n1].to_vec())
        }
        InitStrategy::Explicit(p) => {
            if p.coords().len() != n1 {
                return Err(Error::DimensionMismatch {
                    expected: n1,
                    found: p.coords().len(),
                });
            }
            Ok(p.coords().as_slice().to_vec())
        }
    }
}

/// True when every point lies within the coincidence threshold of the first.
fn is_point_mass(flat: &[f64], n1: usize) -> bool {
    let first = &flat[..n1];
    let n_pts = flat.len() / n1;
    (1..n_pts).all(|i| dist_raw(first, &flat[i * n1..(i + 1) * n1]) < 1e-12)
}

fn finish(raw: RawSolve) -> SolveResult {
    SolveResult {
        point: HPoint::project(DVector::from_vec(raw.point))
            .expect("descent iterates stay on the sheet"),
        grad_norm: raw.grad_norm,
        iterations: raw.iterations,
        converged: raw.converged,
        loss: raw.loss,
    }
}

/// Minimizes the mean quantile loss over the dataset.
///
/// A point-mass dataset (all observations coincident) returns that point
/// with zero iterations: it is the exact minimizer (the loss there is 0 and
/// the envelope bounds it below by `(1 - beta) d` elsewhere), even though
/// the first-order certificate does not apply at an atom; `grad_norm` is
/// reported as 0 in that case.
pub fn sample_quantile(
    data: &Dataset,
    spec: &QuantileSpec,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    cfg.validate()?;
    let n1 = data.dim() + 1;
    if spec.xi().anchor().coords().len() != n1 {
        return Err(Error::DimensionMismatch {
            expected: n1,
            found: spec.xi().anchor().coords().len(),
        });
    }
    let flat = flatten_points(data.points());
    if is_point_mass(&flat, n1) {
        return Ok(SolveResult {
            point: data.point(0).clone(),
            grad_norm: 0.0,
            iterations: 0,
            converged: true,
            loss: 0.0,
        });
    }
    let start = resolve_init(&flat, n1, data, &cfg.init, spec.beta() > 0.0, cfg)?;
    let sgen = if spec.beta() > 0.0 {
        (spec.xi().anchor().coords() + spec.xi().dir().vec())
            .as_slice()
            .to_vec()
    } else {
        Vec::new()
    };
    let mut obj = QuantileObjective::new(&flat, n1, spec.beta(), sgen, spec.curvature().sqrt_neg());
    Ok(finish(descend(&mut obj, &start, cfg)))
}

/// The geometric median: the beta = 0 quantile (direction-independent).
pub fn frechet_median(data: &Dataset, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let n1 = data.dim() + 1;
    let flat = flatten_points(data.points());
    if is_point_mass(&flat, n1) {
        return Ok(SolveResult {
            point: data.point(0).clone(),
            grad_norm: 0.0,
            iterations: 0,
            converged: true,
            loss: 0.0,
        });
    }
    let start = resolve_init(&flat, n1, data, &cfg.init, false, cfg)?;
    let mut obj = QuantileObjective::new(&flat, n1, 0.0, Vec::new(), 1.0);
    Ok(finish(descend(&mut obj, &start, cfg)))
}

/// The Fréchet (Karcher) mean: minimizer of the mean squared distance, via
/// the same descent loop. `MedianStart` here starts from the normalized
/// coordinate mean (the standard warm start for the mean); the minimizer is
/// curvature-independent and distances use the kappa = -1 convention.
pub fn frechet_mean(data: &Dataset, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let n1 = data.dim() + 1;
    let flat = flatten_points(data.points());
    let start = match &cfg.init {
        InitStrategy::MedianStart => {
            let n_pts = data.len();
            let mut mean = vec![0.0; n1];
            for i in 0..n_pts {
                for j in 0..n1 {
                    mean[j] += flat[i * n1 + j];
                }
            }
            for v in mean.iter_mut() {
                *v /= n_pts as f64;
            }
            // The coordinate mean of sheet points lies inside the future
            // cone; lift its spatial part back onto the sheet.
            lift_onto_sheet(&mut mean);
            mean
        }
        other => resolve_init(&flat, n1, data, other, false, cfg)?,
    };
    let mut obj = MeanObjective::new(&flat, n1);
    Ok(finish(descend(&mut obj, &start, cfg)))
}
