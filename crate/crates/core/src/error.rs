use thiserror::Error;

/// Errors surfaced by geometry constructors, the solver, and the analysis
/// pipelines. Numerical non-convergence of the descent loop is *not* an
/// error — it is reported through [`crate::solver::SolveResult::converged`] —
/// but pipelines that cannot produce a meaningful aggregate from partial
/// results (measures, outlier labelling) do fail loudly.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not a hyperboloid point: {0}")]
    InvalidPoint(String),

    #[error("tangent vector is not orthogonal to its base point (<p,v>_M = {defect:e})")]
    InvalidTangent { defect: f64 },

    #[error("point lies outside the open unit ball (|b| = {norm})")]
    OutsideBall { norm: f64 },

    #[error("curvature must be a finite negative real, got {0}")]
    InvalidCurvature(f64),

    #[error("beta must lie in [0, 1), got {0}")]
    InvalidBeta(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dataset must contain at least one point")]
    EmptyDataset,

    #[error("coincident points: {0}")]
    CoincidentPoints(&'static str),

    #[error("direction set must contain an even number K >= 2 of directions, got {0}")]
    OddDirections(usize),

    #[error("no invertible tangent frame among the candidate index sets")]
    SingularFrame,

    #[error("matrix is singular or ill-conditioned (|det| = {det:e})")]
    SingularMatrix { det: f64 },

    #[error("quantile solves did not converge for directions {directions:?} at beta = {beta}")]
    UnconvergedDirections { beta: f64, directions: Vec<usize> },

    #[error("solver did not converge: {0}")]
    NoConvergence(String),

    #[error("all data points coincide with the base point; tangent rank undefined")]
    DegenerateRank,
}

pub type Result<T> = std::result::Result<T, Error>;
