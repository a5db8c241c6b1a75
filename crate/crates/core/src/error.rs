use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by ingestion, ranking and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{file}:{line}: {message}")]
    MalformedRow {
        file: String,
        line: u64,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{file}: {source}")]
    Csv {
        file: String,
        #[source]
        source: csv::Error,
    },

    #[error("{file}: expected header `{expected}`, found `{found}`")]
    BadHeader {
        file: String,
        expected: String,
        found: String,
    },

    #[error("fork cycle in project table involving `{0}`")]
    ForkCycle(String),

    #[error("length mismatch: expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("network has no developers")]
    NoDevelopers,

    #[error("k = {k} exceeds population of {population}")]
    KExceedsPopulation { k: usize, population: usize },

    #[error("dense engine limited to {limit} nodes, network has {actual}")]
    TooLargeForDense { limit: usize, actual: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
