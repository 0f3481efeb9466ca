use std::path::PathBuf;

use thiserror::Error;

use crate::tensor::TensorError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("no snapshots inside the window [{t0}, {t1}]")]
    EmptyWindow { t0: f64, t1: f64 },
    #[error("time step {dt:e} exceeds the CFL limit {limit:e}")]
    CflViolation { dt: f64, limit: f64 },
    #[error("non-finite value in {0} after the step")]
    NonFinite(&'static str),
    #[error("initial-data constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("snapshots do not form a valid window: {0}")]
    WindowMismatch(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid run family: {0}")]
    InvalidFamily(String),
    #[error("missing artifacts: {0}")]
    MissingArtifacts(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("malformed file {path}: {reason}")]
    Format { path: PathBuf, reason: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// `true` for failures of the numerics (as opposed to configuration or I/O).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::CflViolation { .. } | Error::NonFinite(_) | Error::ConstraintViolation(_)
        )
    }
}
