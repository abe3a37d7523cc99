//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CarlError {
    /// A physical or configuration parameter violates its precondition.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Pump wavelength sits exactly on an atomic line; the light shift diverges.
    #[error("zero detuning: pump wavelength coincides with an atomic line")]
    ZeroDetuning,

    /// Scenario file failed validation after parsing.
    #[error("scenario validation failed: {0}")]
    Validation(String),

    /// Scenario or fixture file failed to parse.
    #[error("parse error in {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    /// Numerical blow-up during integration.
    #[error("integration diverged at t = {t_s:.6e} s")]
    IntegrationDiverged { t_s: f64 },

    /// Power-law fit asked for on non-positive data.
    #[error("fit domain error: {0}")]
    FitDomain(String),

    /// Power-law fit with fewer than three usable points.
    #[error("insufficient points for fit: have {have}, need at least 3")]
    InsufficientPoints { have: usize },

    /// Unknown figure tag passed to the repro harness.
    #[error("unknown figure tag `{0}`")]
    UnknownTag(String),

    #[error("i/o error on {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("trace format error: {0}")]
    TraceFormat(String),
}

impl CarlError {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        CarlError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CarlError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code contract: 2 validation, 3 divergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            CarlError::IntegrationDiverged { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CarlError>;
