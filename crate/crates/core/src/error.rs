use std::path::PathBuf;

use thiserror::Error;

use crate::grid::Parity;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value in {what}")]
    NonFinite { what: String },

    #[error("{op} requires {expected:?} parity, got {found:?}")]
    Parity {
        op: &'static str,
        expected: Parity,
        found: Parity,
    },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("singular radial system for axial mode {mode}")]
    SingularSystem { mode: usize },

    #[error("config key `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("time {t} is not after the last sample at {last}")]
    NonMonotoneTime { t: f64, last: f64 },

    #[error("series needs at least {needed} rows, has {found}")]
    TooFewRows { needed: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("diagnostics contract violated: {0}")]
    Contract(String),

    #[error("run aborted at t = {t} (stage {stage}): {reason}")]
    Aborted { t: f64, stage: usize, reason: String },

    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            msg: msg.into(),
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            msg: msg.into(),
        }
    }
}
