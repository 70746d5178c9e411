use thiserror::Error;

/// Errors raised by the library. Variants carry enough context to name the
/// offending input.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown mode id `{0}`")]
    UnknownMode(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("invalid input in `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("zero mode: eigenvalue {energy:e} within {tol:e} of the Fermi level{context}")]
    ZeroMode { energy: f64, tol: f64, context: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unsupported operator string: {0}")]
    Unsupported(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("ensemble failure: {0}")]
    Ensemble(String),
    #[error("ill-conditioned ensemble: {0}")]
    IllConditioned(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid { field: field.into(), reason: reason.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
