use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to parse scenario: {0}")]
    Parse(String),

    #[error("missing required key `{0}`")]
    MissingKey(String),

    #[error("unknown key `{0}`")]
    UnknownKey(String),

    #[error("invalid value for `{key}`: {reason}")]
    Invariant { key: String, reason: String },

    #[error("non-finite result in {0}")]
    NonFinite(&'static str),

    #[error("bus mass term m_dry - m_pl - m_serv is non-positive ({0} kg)")]
    NonPositiveBusMass(f64),

    #[error("requested {requested} kg exceeds service capacity {capacity} kg")]
    CapacityExceeded { requested: f64, capacity: f64 },

    #[error("no feasible extension length is available")]
    EmptyExtensionSet,

    #[error("kernel matrix is not positive definite after jitter escalation")]
    NotPositiveDefinite,

    #[error("training set is degenerate: {0}")]
    DegenerateData(String),

    #[error("model file error: {0}")]
    ModelFormat(String),

    #[error("csv error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invariant(key: &str, reason: impl Into<String>) -> Self {
        Error::Invariant {
            key: key.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}
