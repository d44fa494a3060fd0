use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {what} (residual {residual:e})")]
    NumericalFailure { what: String, residual: f64 },

    #[error("prudence violation: capital factor {factor} <= 0 at step {step}")]
    PrudenceViolation { step: usize, factor: f64 },

    #[error("unsupported protocol: {0}")]
    UnsupportedProtocol(String),

    #[error("end of replayed sequence at step {0}")]
    EndOfSequence(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
