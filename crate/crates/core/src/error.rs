use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CasimirError {
    #[error("pole of {function} at {at}")]
    Pole { function: &'static str, at: f64 },

    #[error("{function}: argument outside domain ({detail})")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("invalid {field}: {detail}")]
    InvalidInput { field: &'static str, detail: String },

    #[error("{what} did not converge after {terms} terms (estimated error {est_error:.3e}, wanted {target:.3e})")]
    Convergence {
        what: &'static str,
        terms: u64,
        est_error: f64,
        target: f64,
    },

    #[error("extrapolation failed: {0}")]
    Extrapolation(String),

    #[error("routes disagree: {detail}")]
    RouteDisagreement { detail: String },
}

impl CasimirError {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            CasimirError::Convergence { .. }
                | CasimirError::Extrapolation(_)
                | CasimirError::RouteDisagreement { .. }
        )
    }

    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        CasimirError::Domain {
            function,
            detail: detail.into(),
        }
    }

    pub(crate) fn invalid(field: &'static str, detail: impl Into<String>) -> Self {
        CasimirError::InvalidInput {
            field,
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = CasimirError> = std::result::Result<T, E>;
