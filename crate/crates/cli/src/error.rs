use std::io;
use std::path::Path;

use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },

    #[error("empty corpus: {0}")]
    EmptyCorpus(String),

    #[error(transparent)]
    Core(#[from] nsgf::Error),
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 2 for invalid parameters or systems, 3 for unreadable or unwritable
    /// files, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use nsgf::Error as E;
        match self {
            CliError::Validation(_) | CliError::EmptyCorpus(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Core(e) => match e {
                E::Io(_) | E::Format(_) | E::Unsupported(_) => 3,
                E::Parameter(_)
                | E::Dimension(_)
                | E::CoveringGap { .. }
                | E::Separation(_)
                | E::Tiling { .. }
                | E::PainlessViolation { .. }
                | E::NotAFrame(_)
                | E::Scheduling { .. } => 2,
                _ => 1,
            },
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(nsgf::Error::Json(e))
    }
}
