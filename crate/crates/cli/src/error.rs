use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed input, schema violation, or a missing file.
    #[error("{0}")]
    Input(String),
    /// Inputs were well formed but no answer exists for them.
    #[error("{0}")]
    Infeasible(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Infeasible(_) => 1,
            CliError::Input(_) | CliError::Io { .. } => 2,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<leakline_core::Error> for CliError {
    fn from(e: leakline_core::Error) -> Self {
        use leakline_core::Error as E;
        match e {
            E::InfeasibleTimeDifference { .. } | E::TooManyLevels { .. } => CliError::Infeasible(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
