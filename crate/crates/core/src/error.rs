use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: genotype cell {value:?} is not one of 0, 1, 2")]
    MissingValue {
        path: PathBuf,
        line: usize,
        value: String,
    },

    #[error("duplicate identifier {0:?}")]
    DuplicateId(String),

    #[error("{path}:{line}: expected {expected} fields, found {found}")]
    RaggedRow {
        path: PathBuf,
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("sample sets do not match: {0}")]
    SampleMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("alpha = 0 has no finite single-feature entry penalty")]
    AlphaZero,

    #[error("coordinate descent did not converge after {iterations} iterations (last max change {max_change:.3e})")]
    NonConvergence {
        iterations: usize,
        max_change: f64,
        last: Vec<f64>,
    },

    #[error("invalid pathway topology: {0}")]
    InvalidTopology(String),

    #[error("causal minor allele frequencies sum to zero")]
    ZeroMafSum,

    #[error("true set is empty; power is undefined")]
    EmptyTruth,

    #[error("rank arrays cover different universes ({0} vs {1} variables)")]
    UniverseMismatch(usize, usize),

    #[error("expected Canberra distance is zero but the observed distance is {0}")]
    ZeroExpectation(f64),

    #[error("p-value {0} lies outside [0, 1]")]
    OutOfRange(f64),

    #[error("invalid rank array: {0}")]
    InvalidRanks(String),

    #[error("correlation undefined: {0} has zero variance")]
    DegenerateVariance(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
