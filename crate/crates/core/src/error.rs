use thiserror::Error;

use crate::quadrature::QuadResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole: {0}")]
    Pole(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("imaginary residue {residue:e} too large for real value {value:e}")]
    Reality { value: f64, residue: f64 },
    #[error("series did not converge within {terms} terms")]
    NonConvergence { terms: usize },
    #[error("growth fit failed: {0}")]
    Fit(String),
    #[error("log-weight {0} out of range")]
    Overflow(f64),
    #[error("quadrature budget of {budget} evaluations exceeded")]
    BudgetExceeded { budget: usize, partial: QuadResult },
    #[error("unknown property `{0}`")]
    UnknownProperty(String),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
