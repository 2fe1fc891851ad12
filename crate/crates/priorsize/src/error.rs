//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("subsample size {k} is below the family's minimum {min_k}")]
    InsufficientData { k: usize, min_k: usize },

    #[error("posterior formula is degenerate for this subsample (division by zero or non-finite moment)")]
    DegenerateStatistic,

    #[error("baseline priors have no prior centrality")]
    BaselineHasNoCentrality,

    #[error("value {value} is outside the function's domain")]
    DomainError { value: f64 },

    #[error("invalid subsample size k={k} for n={n}")]
    InvalidSize { k: usize, n: usize },

    #[error("empty input sequence")]
    EmptyInput,

    #[error("x={x} is below the curve's range (min {min})")]
    OutOfRangeBelow { x: f64, min: f64 },

    #[error("x={x} is above the curve's range (max {max})")]
    OutOfRangeAbove { x: f64, max: f64 },

    #[error("no matching size exists at k={k}: the prior outweighs the extended baseline curve")]
    NonExistence { k: usize },

    #[error("slope regression needs at least {need} points, got {have}")]
    TooFewPoints { have: usize, need: usize },

    #[error("singular denominator: the asymptotic bracket is non-positive")]
    SingularDenominator,

    #[error("every subsample at k={k} produced a degenerate posterior")]
    AllDegenerate { k: usize },

    #[error("parse error on line {line}: {content:?}")]
    Parse { line: usize, content: String },

    #[error("line {line}: value {value} violates the family's support")]
    SupportViolation { line: usize, value: f64 },

    #[error("observation file contains no data")]
    EmptyFile,

    #[error("unknown configuration key {key:?}")]
    UnknownKey { key: String },

    #[error("invalid configuration: {msg}")]
    InvalidConfig { msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
