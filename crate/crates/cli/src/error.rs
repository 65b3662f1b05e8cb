use std::path::PathBuf;

use thiserror::Error;

use crate::svg::PlotError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),

    /// Failure inside an analysis or simulation, tagged with the stage.
    #[error("{stage}: {source}")]
    Numeric { stage: String, source: dob_lab::Error },

    #[error("plot {stage}: {source}")]
    Plot { stage: String, source: PlotError },

    #[error("cannot write {path}: {source}", path = path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric { source: dob_lab::Error::Config(_), .. } => 2,
            CliError::Numeric { .. } | CliError::Plot { .. } => 3,
            CliError::Io { .. } => 4,
        }
    }
}

/// Attaches a stage name to core errors.
pub trait Stage<T> {
    fn stage(self, stage: &str) -> Result<T, CliError>;
}

impl<T> Stage<T> for dob_lab::Result<T> {
    fn stage(self, stage: &str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Numeric { stage: stage.to_string(), source })
    }
}

impl<T> Stage<T> for Result<T, PlotError> {
    fn stage(self, stage: &str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Plot { stage: stage.to_string(), source })
    }
}
