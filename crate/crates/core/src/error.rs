use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("genome length {actual} does not match the expected {expected}")]
    GenomeLength { expected: usize, actual: usize },

    #[error("plasticity is disabled for this network")]
    PlasticityDisabled,

    #[error("observation has {actual} components, network expects {expected}")]
    ObservationLength { expected: usize, actual: usize },

    #[error("action {action} is not valid for an environment with {count} actions")]
    InvalidAction { action: usize, count: usize },

    #[error("step called on a finished episode")]
    EpisodeFinished,

    #[error("graph contains a cycle")]
    CycleDetected,

    #[error("batch mismatch: {0}")]
    BatchMismatch(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown task `{0}`")]
    UnknownTask(String),

    #[error("invalid remap: {0}")]
    Remap(String),

    #[error("no run records found in {0}")]
    EmptyRunDirectory(PathBuf),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
