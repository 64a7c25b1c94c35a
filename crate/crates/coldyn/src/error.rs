use std::path::PathBuf;

use crate::config::ConfigError;
use crate::export::WriteError;
use crate::fetch::FetchError;
use crate::panel::PanelError;
use crate::periods::PeriodError;

/// Any failure surfaced by the command-line front end.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("panel: {0}")]
    Panel(#[from] PanelError),
    #[error("periods: {0}")]
    Period(#[from] PeriodError),
    #[error(transparent)]
    Write(#[from] WriteError),
    #[error("fetch: {0}")]
    Fetch(#[from] FetchError),
    /// A core computation failed; `message` already names dates and tickers.
    #[error("{stage}: {message}")]
    Analysis {
        stage: &'static str,
        message: String,
        numerical: bool,
    },
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl AppError {
    /// 1 input or configuration, 2 numerical, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(ConfigError::Io { .. }) => 3,
            AppError::Config(_) | AppError::Period(_) => 1,
            AppError::Panel(PanelError::Io { .. }) => 3,
            AppError::Panel(_) => 1,
            AppError::Write(_) | AppError::Io { .. } => 3,
            AppError::Fetch(FetchError::Status { .. } | FetchError::Transport { .. }) => 3,
            AppError::Fetch(_) => 1,
            AppError::Analysis { numerical, .. } => {
                if *numerical {
                    2
                } else {
                    1
                }
            }
        }
    }
}
