//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {what}")]
    NonFinite { what: String },

    /// The bracket tensor has no inverse (odd dimension or rank deficiency).
    #[error("degenerate structure: {reason}")]
    DegenerateStructure { reason: String },

    #[error("finite-difference step underflow at coordinate {index} (step {step:e})")]
    StepUnderflow { index: usize, step: f64 },

    #[error("coordinate map Jacobian is not invertible at the requested point")]
    NonInvertibleJacobian,

    #[error("point outside the domain of the coordinate map: {reason}")]
    OutsideDomain { reason: String },

    #[error("integration blew up at step {step} (t = {time})")]
    BlowUp { step: usize, time: f64 },

    /// Evaluation at or beyond a caustic; `nearest` is the closest caustic
    /// in the same time parameter the caller supplied.
    #[error("caustic: {what} at parameter {parameter}, nearest caustic at {nearest}")]
    Caustic {
        what: String,
        parameter: f64,
        nearest: f64,
    },

    #[error("coincidence limit: {what} is singular at zero time")]
    Coincidence { what: String },

    #[error("series did not converge: {what}")]
    SeriesDivergence { what: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn non_finite(what: impl Into<String>) -> Self {
        Error::NonFinite { what: what.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
