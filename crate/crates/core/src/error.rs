use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("edge list contains no nodes")]
    EmptyInput,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("calibration is singular for p = {p} (requires p > 0.5)")]
    SingularCalibration { p: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),

    #[error("network failure fetching {url}: {msg} (retryable)")]
    Network { url: String, msg: String },

    #[error("integrity check failed for {dataset}: expected {expected_nodes} nodes / {expected_edges} edges, found {nodes} / {edges}")]
    Integrity {
        dataset: String,
        expected_nodes: usize,
        expected_edges: usize,
        nodes: usize,
        edges: usize,
    },

    #[error("missing field `{0}`")]
    MissingField(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures that may succeed when retried.
    pub fn is_retryable(&self) -> bool {
        matches!(self, Error::Network { .. })
    }
}
