use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("quadrature did not reach tolerance {tolerance:e}: estimated error {estimate:e} after {panels} panels")]
    ToleranceNotMet { estimate: f64, tolerance: f64, panels: usize },

    #[error("spectral tail beyond k = {k_max} is estimated at {estimate:e}, above the budget {budget:e}")]
    TailBound { k_max: f64, estimate: f64, budget: f64 },

    #[error("integrand does not decay: constant term {magnitude:e} in its large-|k| expansion")]
    NonDecaying { magnitude: f64 },

    #[error("stationary point k = {k} lies beyond the admissible truncation radius")]
    StationaryPointOutOfRange { k: f64 },

    #[error("{what} requires q > 0, got q = {q}")]
    Domain { what: &'static str, q: f64 },

    #[error("domain too small: boundary magnitude reached {ratio:e} of the initial peak at t = {time}")]
    DomainTooSmall { time: f64, ratio: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("insufficient sampling: {0}")]
    InsufficientSampling(String),

    #[error("magnitude {magnitude:e} at t = {t} is below the fitting floor")]
    Underflow { t: f64, magnitude: f64 },

    #[error("non-finite value produced at {0}")]
    NonFinite(String),

    #[error("{} grid point(s) failed; first: {}", .0.len(), FirstFailure(.0))]
    Field(Vec<PointFailure>),
}

/// A single failed grid point of a batch evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFailure {
    pub t: f64,
    pub x: f64,
    pub error: Error,
}

struct FirstFailure<'a>(&'a [PointFailure]);

impl fmt::Display for FirstFailure<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.first() {
            Some(p) => write!(f, "(t = {}, x = {}): {}", p.t, p.x, p.error),
            None => f.write_str("none"),
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { field, reason: reason.into() }
}
