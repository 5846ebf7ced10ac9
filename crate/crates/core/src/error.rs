use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("site ({x},{y},{z}) out of bounds for slab k={k} L={side}")]
    SiteOutOfBounds { x: usize, y: usize, z: usize, k: usize, side: usize },

    #[error("site index {index} out of bounds for {count} sites")]
    IndexOutOfBounds { index: usize, count: usize },

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid spin value {0} (expected -1 or +1)")]
    InvalidSpin(i8),

    #[error("construction not applicable: {0}")]
    ConstructionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("snapshot format error: {0}")]
    SnapshotFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
