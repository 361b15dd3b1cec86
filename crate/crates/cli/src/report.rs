//! JSON report schemas. Every artifact carries `schema_version` so consumers
//! can detect format changes.

use hyperq::{to_ball, HPoint};
use serde::Serialize;

use crate::SCHEMA_VERSION;

/// A location given in both coordinate models.
#[derive(Debug, Clone, Serialize)]
pub struct PointRepr {
    pub ball: Vec<f64>,
    pub hyperboloid: Vec<f64>,
}

impl PointRepr {
    pub fn of(p: &HPoint) -> Self {
        PointRepr {
            ball: to_ball(p).coords().iter().copied().collect(),
            hyperboloid: p.coords().iter().copied().collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct QuantileReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub beta: f64,
    pub xi_angle: f64,
    pub kappa: f64,
    pub converged: bool,
    pub grad_norm: f64,
    pub iterations: usize,
    pub loss: f64,
    pub restarts: usize,
    pub point: PointRepr,
}

#[derive(Debug, Serialize)]
pub struct ContourEntry {
    pub beta: f64,
    /// Direction angles (radians) in the order of `vertices`.
    pub angles: Vec<f64>,
    pub vertices: Vec<PointRepr>,
}

#[derive(Debug, Serialize)]
pub struct ContourReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub directions: usize,
    pub tr: bool,
    pub frame_objective: Option<f64>,
    pub median: PointRepr,
    pub contours: Vec<ContourEntry>,
}

#[derive(Debug, Serialize)]
pub struct MeasuresJson {
    pub schema_version: u32,
    pub command: &'static str,
    pub beta: f64,
    pub beta_hi: f64,
    pub kappa_lo: f64,
    pub directions: usize,
    pub delta1: f64,
    pub delta2: f64,
    pub gamma1: f64,
    /// Components of the mean log vector in the tangent basis at the median.
    pub gamma2: Vec<f64>,
    pub gamma2_norm: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub alpha: f64,
    pub degenerate: bool,
    pub median: PointRepr,
}

#[derive(Debug, Serialize)]
pub struct OutliersJson {
    pub schema_version: u32,
    pub command: &'static str,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dilation: Option<f64>,
    pub directions: usize,
    pub n_points: usize,
    /// Indices of flagged points, in dataset order.
    pub outliers: Vec<usize>,
    /// Labels of the flagged points when the input file had a label column.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outlier_labels: Option<Vec<String>>,
    /// Transformed-space radial coordinate of every point and the decision
    /// radius at its angle, in dataset order.
    pub radius: Vec<f64>,
    pub threshold: Vec<f64>,
    /// Decision boundary in original coordinates, one vertex per direction.
    pub fence: Vec<PointRepr>,
}

#[derive(Debug, Serialize)]
pub struct ConsistencySection {
    pub ref_multiplier: usize,
    /// Median over reps of `d(q_N, q_ref)` per size.
    pub error_medians: Vec<f64>,
    pub strictly_decreasing: bool,
}

#[derive(Debug, Serialize)]
pub struct StabilitySection {
    /// RMS over tangent coordinates of the per-rep sd of `sqrt(N) * coord`.
    pub scaled_sd: Vec<f64>,
    pub max_over_min: f64,
}

#[derive(Debug, Serialize)]
pub struct McReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub family: String,
    pub nu: u8,
    pub beta: f64,
    pub xi_angle: f64,
    pub sizes: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consistency: Option<ConsistencySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stability: Option<StabilitySection>,
}

/// Serializes a report as pretty JSON with a trailing newline.
pub fn to_json_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization");
    s.push('\n');
    s
}

pub fn schema_version() -> u32 {
    SCHEMA_VERSION
}
