use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("point {0} lies outside [0, 1]")]
    OutOfDomain(String),

    #[error("invalid rational literal `{0}`")]
    ParseRational(String),

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("step function is not monotone")]
    NonMonotone,

    #[error("step function is not right-continuous; regularize it first")]
    NotRightContinuous,

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("sum has {count} jumps, above the cap of {cap}")]
    JumpCapExceeded { count: usize, cap: usize },

    #[error("packing of {points} points with spacing {spacing} does not fit in [0, 1]")]
    PackingDoesNotFit { points: usize, spacing: String },

    #[error("enumerating labelings of {points} points exceeds the cap of {cap}")]
    EnumerationCap { points: usize, cap: usize },

    #[error("covering selection violated disjointness: {0}")]
    SelectionViolation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("malformed input: {0}")]
    Malformed(String),
}
