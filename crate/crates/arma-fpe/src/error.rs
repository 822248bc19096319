//! Crate-wide error type.

use thiserror::Error;

use crate::model::Violation;

/// Errors surfaced by model construction, estimation, and the Monte Carlo
/// engine. Validation *verdicts* are not errors — see
/// [`crate::model::validate_params`] — but operations whose preconditions
/// require a valid point report [`Error::InvalidParams`] when handed one
/// that is not.
#[derive(Debug, Error)]
pub enum Error {
    #[error("series length {got} does not match expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("parameter vector has orders ({p1},{p2}) but ({want_p1},{want_p2}) required")]
    OrderMismatch {
        p1: usize,
        p2: usize,
        want_p1: usize,
        want_p2: usize,
    },

    #[error("parameters violate the admissible set: {0:?}")]
    InvalidParams(Vec<Violation>),

    #[error("sample size {n} must exceed parameter count {p_bar}")]
    SampleTooSmall { n: usize, p_bar: usize },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("rational expansion requires denominator with constant term 1, got {0}")]
    NonUnitConstantTerm(f64),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    Asymmetric(f64),

    #[error("no grid point survives the validity filter")]
    EmptyGrid,

    #[error("no start point lies inside the parameter space")]
    NoFeasibleStart,

    #[error("every candidate order failed to fit")]
    AllCandidatesFailed,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
