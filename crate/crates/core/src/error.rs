//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("constraint violated at index {index}: {msg}")]
    ConstraintViolation { index: usize, msg: String },

    #[error("point {x} outside domain [{lo}, {hi}]")]
    DomainViolation { x: String, lo: String, hi: String },

    #[error("ambiguous symbol at step {step}: orbit point within resolution of a critical point")]
    AmbiguousSymbol { step: usize },

    #[error("inadmissible symbol sequence at depth {depth}")]
    Inadmissible { depth: usize },

    #[error("entropy estimate did not reach tolerance: value {value}, bracket [{lower}, {upper}]")]
    NoConvergence { value: f64, lower: f64, upper: f64 },

    #[error("piece budget exhausted: {0}")]
    PieceBudget(String),

    #[error("not Markov within budget ({0} orbit points explored)")]
    NotMarkovWithinBudget(usize),

    #[error("rome invalid: complement contains a loop through vertex {0}")]
    RomeInvalid(usize),

    #[error("entropy must be positive for a constant-slope model (got {0})")]
    EntropyZero(f64),

    #[error("map structure undecided within budget: {0}")]
    UnknownStructure(String),

    #[error("map is not in the monotone simplex: {0}")]
    NotInSigma(String),

    #[error("entropy above target: h_top(T) in [{lower}, {upper}] exceeds h0 = {h0}")]
    EntropyAboveTarget { lower: f64, upper: f64, h0: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
