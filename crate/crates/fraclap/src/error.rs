use thiserror::Error;

/// Errors surfaced by the numerical routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two objects that must share mesh parameters do not.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A quadrature or series did not reach the requested tolerance.
    #[error("numerical failure: {msg} (achieved {achieved:.3e}, requested {requested:.3e})")]
    Numerical {
        msg: String,
        achieved: f64,
        requested: f64,
    },

    /// An iterative solver ran out of iterations.
    #[error("no convergence after {iterations} iterations, last residual {residual:.3e}")]
    NonConvergence { iterations: usize, residual: f64 },

    /// A table radius would exceed its configured hard cap.
    #[error("truncation radius {required} exceeds cap {cap}; achievable tolerance {achievable:.3e}")]
    RadiusCap {
        required: usize,
        cap: usize,
        achievable: f64,
    },

    /// Malformed input data (CSV parsing and similar).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
