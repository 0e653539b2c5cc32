use std::io;

use nk_flow_core::Error as CoreError;

/// Everything that can stop a command, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("domain error: {0}")]
    Domain(#[from] CoreError),
    #[error("invalid model file: {0}")]
    Model(String),
    #[error("integration aborted: {0}")]
    Aborted(CoreError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type AppResult<T> = Result<T, AppError>;

pub const EXIT_OK: i32 = 0;
pub const EXIT_THRESHOLD: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_ABORTED: i32 = 3;

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Aborted(_) => EXIT_ABORTED,
            _ => EXIT_DOMAIN,
        }
    }
}
