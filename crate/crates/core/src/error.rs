//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sample is empty")]
    EmptySample,

    #[error("sample size {n} exceeds population size {population}")]
    SampleExceedsPopulation { n: usize, population: usize },

    #[error("record {id} has degree 0; degree-0 nodes cannot be reached by link-tracing")]
    ZeroDegree { id: String },

    #[error("exact oracle supports at most {limit} {unit}, got {requested}")]
    OracleLimitExceeded {
        limit: usize,
        requested: usize,
        unit: &'static str,
    },

    #[error("inclusion probability for degree {degree} is zero")]
    ZeroInclusionProbability { degree: usize },

    #[error("inclusion map has no entry for degree {0}")]
    UnknownDegree(usize),

    #[error("degenerate group: {0}")]
    DegenerateGroup(&'static str),

    #[error("infeasible mixing parameters: {cell} = {value} is outside [0, 1]")]
    InfeasibleParams { cell: &'static str, value: f64 },

    #[error("degree sequence has odd total stub count {0}")]
    OddStubCount(u64),

    #[error("not enough eligible nodes: need {need}, have {have}")]
    InsufficientEligibleNodes { need: usize, have: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("scenario {id}: {source}")]
    Scenario {
        id: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wraps an error with the scenario it occurred in.
    pub fn in_scenario(self, id: &str) -> Error {
        Error::Scenario {
            id: id.to_owned(),
            source: Box::new(self),
        }
    }
}
