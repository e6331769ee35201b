use thiserror::Error;

/// Errors raised by the chain, oracle, spectrum and analytics routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed input: bad parameters, unsorted grids, empty ranges.
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("site index {site} outside [{min}, {max}]")]
    SiteOutOfRange { site: i64, min: i64, max: i64 },

    /// The request is well formed but outside what the routine supports.
    #[error("unsupported request: {0}")]
    Capability(String),

    /// A numerical invariant failed to hold.
    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("integrator failure at t={t:e} (step {step:e}, error estimate {error_estimate:e}, {steps} steps taken): {reason}")]
    Integrator {
        t: f64,
        step: f64,
        error_estimate: f64,
        steps: usize,
        reason: String,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("incomplete data: threshold never reached for q={q}")]
    IncompleteData { q: i64 },

    #[error("not found: {0}")]
    NotFound(String),
}

impl Error {
    /// True for failures of a numerical invariant or integrator, as opposed to
    /// rejected input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::InvariantViolation(_) | Error::Integrator { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
