//! Command-line front end for `pretense-core`: subcommands for the individual
//! operations and the `verify` bundles that check the identities and growth
//! claims end to end.

pub mod app;
pub mod config;
pub mod descriptor;
pub mod verify;

pub use app::run;
pub use config::ExperimentConfig;

/// Exit code for a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit code for computation errors and failed verification checks.
pub const EXIT_FAILURE: i32 = 1;
/// Exit code for usage errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] pretense_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}
