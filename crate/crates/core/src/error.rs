use thiserror::Error;

/// Errors raised by the sampling, estimation and experiment routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("probability {value} at position {index} is outside [0, 1]")]
    ProbabilityOutOfRange { index: usize, value: f64 },
    #[error("pivotal update needs two undecided probabilities, got ({0}, {1})")]
    DecidedInput(f64, f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("need at least two undecided units, found {0}")]
    TooFewUndecided(usize),
    #[error("population of {size} units exceeds the enumeration cap of {cap}")]
    PopulationTooLarge { size: usize, cap: usize },
    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
