use thiserror::Error;

/// Errors raised by the bound, simulation and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates the invariant of the type it feeds.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A closed form was evaluated outside the region where it holds.
    #[error("domain error: {0}")]
    Domain(String),

    /// An asymptotic assumption (small gamma*T and friends) does not hold.
    #[error("regime violation: {0}")]
    Regime(String),

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} after {evaluations} evaluations")]
    Quadrature {
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("array length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("waveform grids do not match: {0}")]
    GridMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Not enough samples around an evaluation point for the requested truncation.
    #[error("insufficient support: {0}")]
    InsufficientSupport(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
