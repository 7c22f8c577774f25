use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A computed quantity violated an internal sign or range convention.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("calibration error: {0}")]
    Calibration(String),

    #[error("design error: {0}")]
    Design(String),

    /// A requested level transmission cannot be reached by the ring.
    #[error("quantization range error: ring {ring} cannot reach T = {target:.6} (achievable [{low:.6}, {high:.6}])")]
    QuantizationRange {
        ring: usize,
        target: f64,
        low: f64,
        high: f64,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A NaN or infinity appeared in the membrane update.
    #[error("non-finite value in layer {layer} at time-step {step}")]
    NonFinite { layer: usize, step: usize },

    #[error("training error: {0}")]
    Training(String),

    #[error("format error in {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
