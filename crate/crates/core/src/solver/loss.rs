//! The quantile loss, its closed-form Riemannian gradient, and the psi field.
//!
//! With w = log_p(x), d = |w|, u = w/d, a = <xi_p, u> and s = sqrt(-kappa) d
//! the gradient of rho on a manifold of curvature kappa < 0 is
//!
//! `grad rho = -u_k - beta [ s (coth s - a) xi_p^k
//!                           + ((1 - s coth s) a + s) u_k ]`
//!
//! where `u_k`, `xi_p^k` are unit vectors in the kappa-metric. Points are
//! stored on the unit sheet, where s equals the sheet distance and the whole
//! expression is sqrt(-kappa) times its kappa = -1 counterpart; that scalar
//! is applied at the end. The engine below evaluates mean loss and mean
//! gradient over a flattened dataset with no per-point allocation.

use nalgebra::DVector;

use super::QuantileSpec;
use crate::error::{Error, Result};
use crate::geometry::{
    dist_raw, dist_sinh_cosh_raw, mink_dot, mink_norm_sq, radial_field, radial_field_raw, HPoint,
    TangentVec,
};

/// Coincidence threshold on the geodesic distance: below it the distance
/// term has no usable direction and the psi convention applies. The raw
/// inner product cannot make this call (its rounding noise exceeds the
/// spacing), so classification always goes through the difference-based
/// distance.
pub(crate) const COINCIDENT_DIST: f64 = 2e-9;

/// Radius around a data point within which the descent loop runs the
/// nonsmooth first-order test: if a subgradient certificate holds at the
/// atom, the atom is the minimizer and the iterate snaps onto it.
pub(crate) const SNAP_DIST: f64 = 1e-7;

/// Padding factor on the analytic per-term rounding estimates in
/// [`Objective::loss_noise`], absorbing the flop count of a term and the
/// spread of the noise distribution.
const NOISE_SAFETY: f64 = 32.0;

/// Flattens points into a contiguous `N x (n+1)` buffer for the engine.
pub(crate) fn flatten_points(points: &[HPoint]) -> Vec<f64> {
    let n1 = points[0].coords().len();
    let mut flat = Vec::with_capacity(points.len() * n1);
    for p in points {
        flat.extend_from_slice(p.coords().as_slice());
    }
    flat
}

/// Objective evaluated by the descent loop: mean loss and mean Riemannian
/// gradient (embedding coordinates) over the dataset. Implementations may
/// keep scratch buffers, hence `&mut self`.
pub(crate) trait Objective {
    fn loss(&mut self, p: &[f64]) -> f64;
    /// Absolute rounding-noise scale of the most recent [`Objective::loss`]
    /// call, in loss units, generously padded. Inner products between far
    /// points cancel from `~p0 x0` down to `~cosh d`, so the evaluation
    /// noise is data-dependent and can dwarf an ULP of the loss value; the
    /// line search needs this scale to know when loss comparisons stop
    /// carrying information.
    fn loss_noise(&self) -> f64;
    fn mean_grad(&mut self, p: &[f64], out: &mut [f64]);
    /// Factor turning Minkowski norms of gradients into Riemannian norms on
    /// the target manifold (1 for kappa = -1, 1/sqrt(-kappa) otherwise).
    fn riem_norm_factor(&self) -> f64;
    /// Nonsmooth first-order test near a kink. When the iterate sits within
    /// [`SNAP_DIST`] of a data point, reports the atom's coordinates, the
    /// optimality residual `|S|_M - m/N`, and `S` itself, where `S` is the
    /// mean field with the m-fold atom contributing `-m beta xi` (the psi
    /// convention). An m-fold atom's term expands as `r (1 - beta <xi, v>)`
    /// a distance r away along unit v, so its subdifferential is the radius
    /// m/N ball shifted by `-(m/N) beta xi` and the one-sided derivative
    /// along v is `<S, v> + m/N >= m/N - |S|`: a nonpositive residual
    /// certifies the atom as the minimizer, while a positive one makes `-S`
    /// the steepest escape direction. Smooth objectives return `None`.
    fn atom_check(&mut self, p: &[f64]) -> Option<AtomCert> {
        let _ = p;
        None
    }
}

/// Result of [`Objective::atom_check`]: the nearest atom and the nonsmooth
/// first-order data there.
pub(crate) struct AtomCert {
    /// Coordinates of the nearest data point.
    pub(crate) atom: Vec<f64>,
    /// `|S|_M - m/N`; nonpositive certifies the atom as the minimizer.
    pub(crate) resid: f64,
    /// The mean subgradient `S` at the atom (unit-sheet units).
    pub(crate) subgrad: Vec<f64>,
    /// Whether the query point lies inside the coincidence zone, where the
    /// engine's psi-convention field is not a usable descent direction.
    pub(crate) coincident: bool,
}

/// Mean quantile loss over a flattened dataset.
pub(crate) struct QuantileObjective<'a> {
    data: &'a [f64],
    n1: usize,
    n_pts: usize,
    beta: f64,
    /// Null generator y + xi_y of the boundary point; empty when beta = 0.
    sgen: Vec<f64>,
    snk: f64,
    xi_buf: Vec<f64>,
    noise: f64,
}

impl<'a> QuantileObjective<'a> {
    pub(crate) fn new(data: &'a [f64], n1: usize, beta: f64, sgen: Vec<f64>, snk: f64) -> Self {
        let n_pts = data.len() / n1;
        debug_assert_eq!(data.len(), n_pts * n1);
        debug_assert!(beta == 0.0 || sgen.len() == n1);
        QuantileObjective {
            data,
            n1,
            n_pts,
            beta,
            sgen,
            snk,
            xi_buf: vec![0.0; n1],
            noise: 0.0,
        }
    }

    #[inline]
    fn prepare_field(&mut self, p: &[f64]) {
        if self.beta != 0.0 {
            // xi_p is shared by every data term at this iterate.
            let buf = &mut self.xi_buf;
            radial_field_raw(&self.sgen, p, buf);
        }
    }
}

/// One smooth data term of the unit-sheet gradient, accumulated into `out`.
#[inline]
fn smooth_grad_term(beta: f64, xi: &[f64], p: &[f64], x: &[f64], out: &mut [f64]) {
    let (d, sh, ch) = dist_sinh_cosh_raw(p, x);
    let (coef_u, coef_xi) = if beta == 0.0 {
        (-1.0, 0.0)
    } else {
        let a = mink_dot(xi, x) / sh;
        let dcoth = d * ch / sh;
        (
            -1.0 - beta * ((1.0 - dcoth) * a + d),
            -beta * (dcoth - d * a),
        )
    };
    // u = (x - cosh(d) p) / sinh d
    let cu = coef_u / sh;
    if coef_xi == 0.0 {
        // beta = 0 callers may pass an empty xi slice.
        for j in 0..p.len() {
            out[j] += cu * (x[j] - ch * p[j]);
        }
    } else {
        for j in 0..p.len() {
            out[j] += cu * (x[j] - ch * p[j]) + coef_xi * xi[j];
        }
    }
}

impl<'a> Objective for QuantileObjective<'a> {
    fn loss(&mut self, p: &[f64]) -> f64 {
        self.prepare_field(p);
        let mut sum = 0.0;
        let mut ns = 0.0;
        for i in 0..self.n_pts {
            let x = &self.data[i * self.n1..(i + 1) * self.n1];
            let (d, sh, _) = dist_sinh_cosh_raw(p, x);
            let mut term = d;
            if self.beta != 0.0 && sh > 0.0 {
                // d * <xi_p, u> = d * <xi_p, x> / sinh d  (xi_p is tangent,
                // so the -c p part of u drops out of the inner product).
                term += self.beta * d * mink_dot(&self.xi_buf, x) / sh;
            }
            sum += term;
            if sh > 0.0 {
                // The distance comes out of products ~p0 x0 cancelling down
                // to ~cosh d (near points take the difference branch, which
                // behaves like the sinh factor below); the <xi, x> product
                // cancels the same way and is scaled by beta d / sinh d.
                let scale = p[0] * x[0];
                ns += scale
                    * ((2.0 + d) * sh.min(1.0 / sh)
                        + self.beta * (1.0 + d) * (d / sh).min(1.0));
            }
        }
        self.noise = NOISE_SAFETY * f64::EPSILON * ns / self.n_pts as f64 / self.snk;
        sum / self.n_pts as f64 / self.snk
    }

    fn loss_noise(&self) -> f64 {
        self.noise
    }

    fn mean_grad(&mut self, p: &[f64], out: &mut [f64]) {
        self.prepare_field(p);
        out.fill(0.0);
        for i in 0..self.n_pts {
            let x = &self.data[i * self.n1..(i + 1) * self.n1];
            if dist_raw(p, x) < COINCIDENT_DIST {
                // psi convention at a coincident atom: -beta xi_p.
                if self.beta != 0.0 {
                    for (o, xi) in out.iter_mut().zip(&self.xi_buf) {
                        *o -= self.beta * xi;
                    }
                }
                continue;
            }
            smooth_grad_term(self.beta, &self.xi_buf, p, x, out);
        }
        let scale = self.snk / self.n_pts as f64;
        for v in out.iter_mut() {
            *v *= scale;
        }
    }

    fn riem_norm_factor(&self) -> f64 {
        1.0 / self.snk
    }

    fn atom_check(&mut self, p: &[f64]) -> Option<AtomCert> {
        let mut nearest = f64::INFINITY;
        let mut who = 0;
        for i in 0..self.n_pts {
            let x = &self.data[i * self.n1..(i + 1) * self.n1];
            let d = dist_raw(p, x);
            if d < nearest {
                nearest = d;
                who = i;
            }
        }
        if nearest > SNAP_DIST {
            return None;
        }
        let atom = self.data[who * self.n1..(who + 1) * self.n1].to_vec();
        self.prepare_field(&atom);
        let mut s = vec![0.0; self.n1];
        let mut multiplicity = 0usize;
        for i in 0..self.n_pts {
            let x = &self.data[i * self.n1..(i + 1) * self.n1];
            if dist_raw(&atom, x) < COINCIDENT_DIST {
                multiplicity += 1;
                continue;
            }
            smooth_grad_term(self.beta, &self.xi_buf, &atom, x, &mut s);
        }
        if self.beta != 0.0 {
            for (sj, xi) in s.iter_mut().zip(&self.xi_buf) {
                *sj -= multiplicity as f64 * self.beta * xi;
            }
        }
        let n = self.n_pts as f64;
        for v in s.iter_mut() {
            *v /= n;
        }
        // Clean residual off-tangency at the atom before taking the norm.
        let b = mink_dot(&atom, &s);
        for j in 0..self.n1 {
            s[j] += b * atom[j];
        }
        let resid = mink_norm_sq(&s).max(0.0).sqrt() - multiplicity as f64 / n;
        Some(AtomCert {
            atom,
            resid,
            subgrad: s,
            coincident: nearest < COINCIDENT_DIST,
        })
    }
}

/// Mean squared distance, for the Fréchet mean (kappa = -1 convention; the
/// minimizer is curvature-independent).
pub(crate) struct MeanObjective<'a> {
    data: &'a [f64],
    n1: usize,
    n_pts: usize,
    noise: f64,
}

impl<'a> MeanObjective<'a> {
    pub(crate) fn new(data: &'a [f64], n1: usize) -> Self {
        let n_pts = data.len() / n1;
        MeanObjective {
            data,
            n1,
            n_pts,
            noise: 0.0,
        }
    }
}

impl<'a> Objective for MeanObjective<'a> {
    fn loss(&mut self, p: &[f64]) -> f64 {
        let mut sum = 0.0;
        let mut ns = 0.0;
        for i in 0..self.n_pts {
            let x = &self.data[i * self.n1..(i + 1) * self.n1];
            let (d, sh, _) = dist_sinh_cosh_raw(p, x);
            sum += d * d;
            if sh > 0.0 {
                ns += p[0] * x[0] * 2.0 * d * sh.min(1.0 / sh);
            }
        }
        self.noise = NOISE_SAFETY * f64::EPSILON * ns / self.n_pts as f64;
        sum / self.n_pts as f64
    }

    fn loss_noise(&self) -> f64 {
        self.noise
    }

    fn mean_grad(&mut self, p: &[f64], out: &mut [f64]) {
        // grad of d(p,x)^2 is -2 log_p(x) = -2 d (x - cosh(d) p) / sinh d.
        out.fill(0.0);
        for i in 0..self.n_pts {
            let x = &self.data[i * self.n1..(i + 1) * self.n1];
            let (d, sh, ch) = dist_sinh_cosh_raw(p, x);
            if sh == 0.0 {
                continue; // zero gradient contribution at the point itself
            }
            let w = -2.0 * d / sh;
            for j in 0..self.n1 {
                out[j] += w * (x[j] - ch * p[j]);
            }
        }
        let scale = 1.0 / self.n_pts as f64;
        for v in out.iter_mut() {
            *v *= scale;
        }
    }

    fn riem_norm_factor(&self) -> f64 {
        1.0
    }
}

fn check_dims(x: &HPoint, p: &HPoint, spec: &QuantileSpec) -> Result<()> {
    let n1 = p.coords().len();
    if x.coords().len() != n1 {
        return Err(Error::DimensionMismatch {
            expected: n1,
            found: x.coords().len(),
        });
    }
    if spec.xi().anchor().coords().len() != n1 {
        return Err(Error::DimensionMismatch {
            expected: n1,
            found: spec.xi().anchor().coords().len(),
        });
    }
    Ok(())
}

/// The loss rho(x, p; beta, xi) on the curvature-kappa manifold.
pub fn loss_rho(x: &HPoint, p: &HPoint, spec: &QuantileSpec) -> Result<f64> {
    check_dims(x, p, spec)?;
    let (d, sh, _) = dist_sinh_cosh_raw(p.as_slice(), x.as_slice());
    let snk = spec.curvature().sqrt_neg();
    if d == 0.0 || sh == 0.0 {
        return Ok(0.0);
    }
    let mut value = d;
    if spec.beta() != 0.0 {
        let xi_p = radial_field(spec.xi(), p);
        value += spec.beta() * d * mink_dot(xi_p.as_slice(), x.as_slice()) / sh;
    }
    Ok(value / snk)
}

/// Riemannian gradient of `p -> rho(x, p)` as a tangent vector at p
/// (embedding coordinates; its kappa-metric norm is `|.|_M / sqrt(-kappa)`).
/// Coincident x = p is an error — use [`psi`] for the total field.
pub fn grad_rho(x: &HPoint, p: &HPoint, spec: &QuantileSpec) -> Result<TangentVec> {
    check_dims(x, p, spec)?;
    if dist_raw(p.as_slice(), x.as_slice()) < COINCIDENT_DIST {
        return Err(Error::CoincidentPoints(
            "grad_rho is undefined at x = p; psi supplies the convention",
        ));
    }
    let snk = spec.curvature().sqrt_neg();
    let beta = spec.beta();
    let n1 = p.coords().len();
    let mut out = DVector::zeros(n1);
    if beta == 0.0 {
        smooth_grad_term(0.0, &[], p.as_slice(), x.as_slice(), out.as_mut_slice());
    } else {
        let xi_p = radial_field(spec.xi(), p);
        smooth_grad_term(
            beta,
            xi_p.as_slice(),
            p.as_slice(),
            x.as_slice(),
            out.as_mut_slice(),
        );
    }
    Ok(TangentVec::project(p.clone(), out * snk))
}

/// The full first-order field: `grad_rho` away from coincidence and the
/// limit convention `-beta xi_p` (kappa-unit) at x = p.
pub fn psi(x: &HPoint, p: &HPoint, spec: &QuantileSpec) -> Result<TangentVec> {
    check_dims(x, p, spec)?;
    if dist_raw(p.as_slice(), x.as_slice()) < COINCIDENT_DIST {
        if spec.beta() == 0.0 {
            return Ok(TangentVec::zero(p.clone()));
        }
        let xi_p = radial_field(spec.xi(), p);
        return Ok(xi_p.scale(-spec.beta() * spec.curvature().sqrt_neg()));
    }
    grad_rho(x, p, spec)
}

/// Mean psi field over a dataset — the certificate quantity reported by the
/// solver; exposed for diagnostics and tests.
pub fn mean_psi(points: &[HPoint], p: &HPoint, spec: &QuantileSpec) -> Result<TangentVec> {
    let mut acc = TangentVec::zero(p.clone());
    for x in points {
        acc = acc.add(&psi(x, p, spec)?);
    }
    Ok(acc.scale(1.0 / points.len() as f64))
}
