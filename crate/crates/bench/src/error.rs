use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unknown suite `{name}`; available suites: {available}")]
    UnknownSuite { name: String, available: String },
    #[error(transparent)]
    Core(#[from] singcov::Error),
    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type BenchResult<T> = std::result::Result<T, BenchError>;
