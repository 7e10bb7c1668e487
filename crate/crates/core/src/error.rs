use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("cannot evaluate a Laurent polynomial at t = 0")]
    EvalAtZero,

    #[error("inexact division: relative remainder {relative_remainder:e} exceeds {tolerance:e}")]
    InexactDivision {
        relative_remainder: f64,
        tolerance: f64,
    },

    #[error("matrix is not unimodular: |det - 1| = {0:e}")]
    NotUnimodular(f64),

    #[error("degenerate trace: {0}")]
    DegenerateTrace(String),

    #[error("representation is off the Riley variety (residual {0:e})")]
    NotOnRileyVariety(f64),

    #[error("closed form is singular: {0} vanishes")]
    ClosedFormSingular(&'static str),

    #[error("no nonabelian roots: every Riley root was excluded")]
    NoNonabelianRoots,
}
