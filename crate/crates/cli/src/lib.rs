//! Command implementations behind the `hyperq` binary, exposed as a library
//! so integration tests can drive the pipelines in-process.

pub mod app;
pub mod io;
pub mod mc;
pub mod report;
pub mod svg;

/// Version stamp carried by every JSON artifact.
pub const SCHEMA_VERSION: u32 = 1;

/// Process outcome: `Input` maps to exit code 3, `NonConvergence` to exit
/// code 2 (after printing the diagnostic JSON), success to 0.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    NonConvergence(serde_json::Value),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "{msg}"),
            CliError::NonConvergence(v) => write!(f, "non-convergence: {v}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<hyperq::Error> for CliError {
    fn from(e: hyperq::Error) -> Self {
        match &e {
            hyperq::Error::UnconvergedDirections { beta, directions } => {
                CliError::NonConvergence(serde_json::json!({
                    "schema_version": SCHEMA_VERSION,
                    "error": "non-convergence",
                    "beta": beta,
                    "directions": directions,
                }))
            }
            hyperq::Error::NoConvergence(msg) => {
                CliError::NonConvergence(serde_json::json!({
                    "schema_version": SCHEMA_VERSION,
                    "error": "non-convergence",
                    "detail": msg,
                }))
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}
