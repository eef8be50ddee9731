use thiserror::Error;

/// Errors produced by sampling, reconstruction, repair and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid coordinates: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("degenerate sample: every pair of points is at distance zero")]
    DegenerateSample,

    #[error("reconstruction failed: no level p >= 1 has matching brackets on its chain ({explored} levels explored)")]
    ReconstructionFailed { explored: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
