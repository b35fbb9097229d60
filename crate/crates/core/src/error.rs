use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A model was evaluated outside the set where it is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A denominator or normalisation collapsed; signals an unphysical or touching configuration.
    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    /// The spectral quadrature exhausted its refinement levels.
    #[error("quadrature did not converge after {levels} levels (estimated relative error {est_error:.3e})")]
    NonConvergence { levels: usize, est_error: f64 },

    /// An input violated a structural invariant; `field` names the offending input.
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
