use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("points belong to different spaces: {0}")]
    MixedSpace(String),
    #[error("empty schedule")]
    EmptySchedule,
    #[error("window [{m}, {n}] out of range for trace of length {len}")]
    WindowOutOfRange { m: usize, n: usize, len: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("sampling not supported: {0}")]
    SamplingUnsupported(String),
    #[error("radius {0} below representable resolution")]
    RadiusTooSmall(f64),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("unknown system id: {0}")]
    UnknownSystem(String),
    #[error("invalid runs encoding: {0}")]
    InvalidRuns(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
