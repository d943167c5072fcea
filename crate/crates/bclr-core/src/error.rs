//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by samplers, feature pipelines, and file formats.
#[derive(Debug, Error)]
pub enum Error {
    /// A coefficient vector contained a NaN or infinity.
    #[error("invalid coefficients")]
    InvalidCoefficients,

    /// The posterior precision matrix could not be factorized.
    #[error("ill-conditioned precision")]
    IllConditionedPrecision,

    /// The sampler was handed a matrix whose columns are not standardized.
    #[error("data must be centered and scaled")]
    NotStandardized,

    /// A frame had zero pixel variance and cannot be standardized.
    #[error("zero-variance frame{}", frame.map(|i| format!(" at index {i}")).unwrap_or_default())]
    ZeroVarianceFrame {
        /// Index of the offending frame within a series, when known.
        frame: Option<usize>,
    },

    /// The marginal Monte Carlo oracle only supports a zero-mean prior.
    #[error("oracle requires zero-mean prior")]
    OracleRequiresZeroMean,

    /// A prior failed validation (dimensions, symmetry, positive definiteness).
    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    /// A configuration or input shape violated a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An image-stack or CSV payload was malformed.
    #[error("malformed data: {0}")]
    Format(String),

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
