use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource limit: dimension {requested} exceeds the configured maximum {limit}")]
    ResourceLimit { requested: usize, limit: usize },

    #[error("eigensolver failure: {0}")]
    SolverFailure(String),

    #[error("internal consistency violated: {0}")]
    InternalConsistency(String),

    #[error("methods disagree: matched distance {distance:.3e} exceeds {limit:.3e}")]
    MethodDisagreement { distance: f64, limit: f64 },

    #[error("broken conjugacy: eigenvalue {re}{im:+}i has no conjugate partner within {limit:.3e} (nearest {distance:.3e})")]
    BrokenConjugacy {
        re: f64,
        im: f64,
        distance: f64,
        limit: f64,
    },

    #[error("invalid bracket [{low}, {high}]: reality predicate is {state} at both ends")]
    InvalidBracket {
        low: f64,
        high: f64,
        state: &'static str,
    },

    #[error("precision not reached: {achieved:.1} digits certified, {target} requested")]
    PrecisionNotReached { achieved: f64, target: u32 },

    #[error("need more 1D levels: {0}")]
    NeedMoreLevels(String),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
