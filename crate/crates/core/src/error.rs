use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("node {node} active in overlapping events at t={first} and t={second}")]
    OverlapViolation { node: String, first: f64, second: f64 },

    #[error("unsupported input: {0}")]
    UnsupportedInput(String),

    #[error("invalid joining rule: {0}")]
    InvalidRule(String),

    #[error("event out of order: timestamp {timestamp} precedes the stream head")]
    OutOfOrder { timestamp: f64 },

    #[error("threshold {dt} exceeds the graph's build bound {bound}")]
    InvalidThreshold { dt: f64, bound: f64 },

    #[error("graph has no edges")]
    EdgelessGraph,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dense node matrix requested for {nodes} nodes (limit {limit})")]
    Capacity { nodes: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
