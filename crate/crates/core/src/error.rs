use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("distortion `{0}` does not support this operation: {1}")]
    UnsupportedKind(String, String),

    #[error("score undefined: {0}")]
    ScoreUndefined(String),

    #[error("score undefined at observation {index}: {source}")]
    AtObservation {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("score undefined at draw {index}: {source}")]
    AtDraw {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("model contract violated: {0}")]
    ModelContract(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate importance weights: {0}")]
    DegenerateWeights(String),

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("sampler initialization failed: {0}")]
    Initialization(String),

    #[error("unknown {what} `{name}`")]
    Unknown { what: &'static str, name: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unsupported configuration: {0}")]
    UnsupportedConfig(String),

    #[error("{path}: {message}")]
    Ingest { path: PathBuf, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    /// Stable machine-readable tag, used by the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::UnsupportedKind(..) => "unsupported-kind",
            Error::ScoreUndefined(_) => "score-undefined",
            Error::AtObservation { source, .. } | Error::AtDraw { source, .. } => source.kind(),
            Error::ModelContract(_) => "model-contract",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::DegenerateWeights(_) => "degenerate-weights",
            Error::InsufficientSamples { .. } => "insufficient-samples",
            Error::Initialization(_) => "initialization",
            Error::Unknown { .. } => "unknown-name",
            Error::Config(_) => "config",
            Error::UnsupportedConfig(_) => "unsupported-config",
            Error::Ingest { .. } => "ingest",
            Error::Io { .. } => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
            Error::Toml(_) => "config",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
