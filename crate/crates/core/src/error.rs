use alloc::string::String;

use crate::{NodeId, Step};

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid degree history: past degree {past} exceeds current degree {now}")]
    InvalidHistory { now: u32, past: u32 },
    #[error("node has degree 0 and cannot carry a recency factor")]
    InvalidNode,
    #[error("unknown node {0}")]
    NodeNotFound(NodeId),
    #[error("step {requested} is after the current step {current}")]
    FutureStep { requested: Step, current: Step },
    #[error("attachment weights sum to zero")]
    DegenerateWeights,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate sample: {0}")]
    DegenerateSample(&'static str),
    #[error("insufficient data: {0}")]
    InsufficientData(&'static str),
    #[error("models were fitted on different tails (xmin {a} vs {b})")]
    InvalidComparison { a: u32, b: u32 },
    #[error("log-likelihood differences have zero spread; the ratio test is undefined")]
    UndefinedTest,
    #[error("selection weights vanish for every node")]
    SingularState,
    #[error("integration step produced a negative recency; reduce the step size")]
    StepSize,
    #[error("asymptotic selection probability has a zero denominator")]
    SingularParameters,
}
