use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("PerfectSquareError: {0} is a perfect square")]
    PerfectSquare(String),
    #[error("ZeroDenominator: Q must be nonzero")]
    ZeroDenominator,
    #[error("invalid radicand {0}: D must be at least 2")]
    InvalidRadicand(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("PrecisionError: {0}")]
    Precision(String),
    #[error("NonPositiveInput: {0}")]
    NonPositiveInput(String),
    #[error("InvalidChain: u_{index} = {prev} does not divide u_{next_index} = {next}", next_index = .index + 1)]
    InvalidChain { index: usize, prev: String, next: String },
    #[error("NotMUnit: u_{index} = {value} does not factor over M = {primes:?}")]
    NotMUnit { index: usize, value: String, primes: Vec<u64> },
    #[error("NotIncreasing: u_{index} = {value} is not larger than its predecessor")]
    NotIncreasing { index: usize, value: String },
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
    #[error("index {index} is outside the sequence (length {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("DegeneratePeriod: preperiod 0 with period length 1 has no distinguished convergent")]
    DegeneratePeriod,
    #[error("HypothesisViolation: {0}")]
    HypothesisViolation(String),
    #[error("AssertionFailure: {0}")]
    AssertionFailure(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
