use dephaselab_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;
pub const EXIT_DISAGREEMENT: i32 = 4;

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e {
                CoreError::Divergence { .. }
                | CoreError::NoConvergence { .. }
                | CoreError::UnsupportedSpectrum { .. }
                | CoreError::Singular
                | CoreError::UndefinedPhase => EXIT_DIVERGENCE,
                CoreError::Oracle(_) => EXIT_DISAGREEMENT,
                _ => EXIT_CONFIG,
            },
            CliError::Io { .. } | CliError::Json(_) | CliError::Csv(_) | CliError::Config(_) => EXIT_CONFIG,
        }
    }
}
