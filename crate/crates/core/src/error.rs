use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    Param(String),

    #[error("n*k = {needed} vertex slots exceed the configured bit width {width}")]
    Capacity { needed: usize, width: u32 },

    #[error("families are over different parameters ({left} vs {right})")]
    ParamsMismatch { left: String, right: String },

    #[error("operation requires a non-empty family")]
    EmptyFamily,

    #[error("invalid vertex {0}")]
    InvalidVertex(String),

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("outside the defined range: {0}")]
    Range(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("search budget exceeded after {nodes} nodes (best found {best}, open upper bound {bound})")]
    Budget { nodes: u64, best: usize, bound: usize },

    #[error("unknown suite {0:?}")]
    UnknownSuite(String),

    #[error("group of order {order} exceeds the canonicalization budget {budget}")]
    GroupBudget { order: u128, budget: u128 },
}
