use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("weight {weight} on line {line} is outside [1, inf)")]
    WeightOutOfRange { line: usize, weight: f64 },

    #[error("scale must be positive and finite, got {0}")]
    InvalidScale(f64),

    #[error("shift vector has length {got}, graph has {expected} vertices")]
    ShiftLengthMismatch { expected: usize, got: usize },

    #[error("source list is empty")]
    EmptySources,

    #[error("vertex {0} does not exist")]
    UnknownVertex(usize),

    #[error("vertex {0} is not clustered")]
    Unclustered(usize),

    #[error("blur input must be a nonempty proper subset of V")]
    InvalidBlurSet,

    #[error("{what}: resample budget of {budget} attempts exhausted")]
    ResampleBudget { what: &'static str, budget: usize },

    #[error("demand is unbalanced: sum = {sum}, l1 = {l1}")]
    UnbalancedDemand { sum: f64, l1: f64 },

    #[error("vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("oracle limited to n <= {max}, got n = {n}")]
    OracleTooLarge { n: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
