use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid probability vector: {0}")]
    InvalidProbVector(String),

    #[error("invalid structure matrix: {0}")]
    InvalidStructure(String),

    #[error("lambda must lie in [0, 1], got {0}")]
    InvalidLambda(f64),

    #[error("structure scale factor must be finite and non-negative, got {0}")]
    InvalidScale(f64),

    #[error("degenerate structure: mean squared structure difference {0:e} is below 1e-15")]
    DegenerateStructure(f64),

    #[error("zero-norm embedding for token {index} of sentence `{id}` under cosine cost")]
    ZeroNormEmbedding { id: String, index: usize },

    #[error("weight scheme produced zero total mass for sentence `{0}`")]
    ZeroWeightMass(String),

    #[error("invalid sentence bundle `{id}`: {reason}")]
    InvalidBundle { id: String, reason: String },

    #[error("transport simplex did not terminate after {0} pivots")]
    SimplexStalled(usize),

    #[error("metric undefined: {0}")]
    MetricUndefined(String),

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("unknown sentence id `{0}`")]
    UnknownId(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
