//! Crate-wide error type.

use thiserror::Error;

/// Broad failure category, used by callers (e.g. the CLI) to select exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Invalid configuration or parameters outside a model's domain.
    Config,
    /// Malformed, truncated or inconsistent data files.
    Data,
    /// Numerical failure (non-convergence, degenerate inputs).
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("parameter out of model domain: {0}")]
    OutOfDomain(String),

    #[error("bad stack file: {0}")]
    BadStackFile(String),

    #[error("stack/config mismatch: {0}")]
    StackMismatch(String),

    #[error("variance estimate indeterminate for a single sample (K=1)")]
    IndeterminateVariance,

    #[error("need at least {need} frames, got {got}")]
    TooFewFrames { need: usize, got: usize },

    #[error("region of interest is empty after trimming the shift margin ({0})")]
    EmptyRoi(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("binning factor {factor} does not divide frame dimensions {width}x{height}")]
    BinningMismatch { factor: u32, width: u32, height: u32 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("fit did not converge after {iterations} iterations (residual {residual:.3e})")]
    FitDidNotConverge { iterations: usize, residual: f64 },

    #[error("correlation map too small: {0}")]
    MapTooSmall(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidConfig(_) | Error::OutOfDomain(_) => ErrorCategory::Config,
            Error::BadStackFile(_)
            | Error::StackMismatch(_)
            | Error::ShapeMismatch(_)
            | Error::Io(_) => ErrorCategory::Data,
            Error::IndeterminateVariance
            | Error::TooFewFrames { .. }
            | Error::EmptyRoi(_)
            | Error::BinningMismatch { .. }
            | Error::DegenerateInput(_)
            | Error::FitDidNotConverge { .. }
            | Error::MapTooSmall(_) => ErrorCategory::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
