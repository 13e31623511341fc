use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the requested function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no sign change of the critical-point equation below r = {cap}")]
    NoSignChange { cap: f64 },

    #[error(
        "quadrature error estimate {estimate:e} exceeds tolerance {tolerance:e} after refinement"
    )]
    QuadratureTolerance { estimate: f64, tolerance: f64 },

    /// The guard scan for a supremum found a value above the critical-point value.
    #[error("guard scan found {found} at r = {at}, above critical-point value {critical}")]
    GuardScan { found: f64, at: f64, critical: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
