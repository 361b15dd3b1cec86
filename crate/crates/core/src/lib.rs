//! Geometric (beta, xi)-quantiles on hyperbolic space.
//!
//! The crate implements, on the hyperboloid model:
//!
//! * [`geometry`] — the Minkowski form, exp/log/dist, the Poincaré-ball
//!   isometry, ideal boundary directions and radial fields, parallel
//!   transport, Lorentz isometries;
//! * [`solver`] — the quantile loss `rho(x, p) = d(p,x) (1 + beta cos
//!   angle_p(x, xi))`, its closed-form Riemannian gradient, and projected
//!   gradient descent with backtracking for sample quantiles, Fréchet means
//!   and medians;
//! * [`analysis`] — isoquantile contours, the tangent-frame reparametrization
//!   (TR) that undoes anisotropy before contouring, quantile-based
//!   dispersion/skewness/kurtosis/asymmetry measures, and the two outlier
//!   rules built on extreme contours;
//! * [`datagen`] — seeded synthetic generators (dispersion / skewness /
//!   kurtosis / spherical families) and the Euclidean Weiszfeld geometric
//!   median used to center them.

pub mod analysis;
pub mod datagen;
mod error;
pub mod geometry;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{
    dist, exp_map, from_ball, log_map, minkowski_inner, parallel_transport, radial_field,
    tangent_basis, to_ball, BPoint, BoundaryDir, Curvature, HPoint, LorentzIsometry, TangentVec,
};
pub use solver::{
    frechet_mean, frechet_median, grad_rho, loss_rho, mean_psi, psi, sample_quantile, Dataset,
    InitStrategy, QuantileSpec, SolveResult, SolverConfig,
};
