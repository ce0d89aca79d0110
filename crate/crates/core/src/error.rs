use thiserror::Error;

/// Failures reported by the solvers and the parameter pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The certified tail bound could not be pushed below the requested
    /// tolerance within the configured mode cap. An infinite bound means the
    /// series has no pointwise value at the requested point.
    #[error("truncation failure for {field}: tail bound {achieved:e} with {n_max} modes, tolerance {tol:e}")]
    Truncation {
        field: &'static str,
        achieved: f64,
        tol: f64,
        n_max: usize,
    },

    /// The requested maximum is infinite (purely elastic medium under a
    /// discontinuous load). Use the divergence diagnostic instead.
    #[error("blow-up: {0} is unbounded for eta_hat = 0")]
    BlowUp(&'static str),

    #[error("parse error at key `{key}`: {reason}")]
    Parse { key: String, reason: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True when the failure is a genuine divergence rather than a cap on the
    /// number of modes.
    pub fn is_divergent(&self) -> bool {
        matches!(self, Error::Truncation { achieved, .. } if achieved.is_infinite())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
