use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent caller input.
    #[error("invalid input: {0}")]
    Input(String),

    /// A data record violates a model invariant.
    #[error("subject {subject}: {reason}")]
    Validation { subject: String, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    /// Singular or otherwise unusable linear algebra.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An iterate left the compact parameter region.
    #[error("divergence: {0}")]
    Divergence(String),

    #[error("regression parameter not identifiable: {0}")]
    NonIdentifiable(String),

    #[error("line search stagnated after {iterations} iterations (loglik {loglik}, directional derivative {slope:e})")]
    Stagnation {
        iterations: usize,
        loglik: f64,
        slope: f64,
    },

    /// Resampling or Monte Carlo summaries are unreliable.
    #[error("inference failure: {0}")]
    Inference(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn validation(subject: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            subject: subject.into(),
            reason: reason.into(),
        }
    }
}
