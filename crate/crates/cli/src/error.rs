use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] qsd_core::Error),

    #[error("{}: {1}", .0.display())]
    Io(PathBuf, #[source] std::io::Error),

    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    /// 2 for bad input, 1 for everything that went wrong while running.
    pub fn exit_code(&self) -> i32 {
        use qsd_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                E::IntegrationDiverged { .. }
                | E::StepFailure { .. }
                | E::EnsembleFailed { .. }
                | E::Io(_)
                | E::Csv(_)
                | E::AtNode { .. } => 1,
                _ => 2,
            },
            CliError::Io(..) | CliError::Verify(_) => 1,
        }
    }
}
