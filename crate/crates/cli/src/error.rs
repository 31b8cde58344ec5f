use std::path::PathBuf;

use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Format(String),

    #[error("{0}")]
    Invariant(String),

    #[error("{0}")]
    Config(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn class(&self) -> &'static str {
        match self {
            Self::Io { .. } => "io",
            Self::Format(_) => "format",
            Self::Invariant(_) => "invariant",
            Self::Config(_) => "config",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Io { .. } => 3,
            Self::Format(_) => 4,
            Self::Invariant(_) => 5,
            Self::Config(_) => 6,
        }
    }

    pub fn to_json(&self) -> String {
        json!({
            "error": {
                "class": self.class(),
                "exit_code": self.exit_code(),
                "message": self.to_string(),
            }
        })
        .to_string()
    }
}

impl From<repairforge::Error> for CliError {
    fn from(e: repairforge::Error) -> Self {
        use repairforge::Error as E;
        match e {
            E::Format(_) => Self::Format(e.to_string()),
            E::PayloadMismatch { .. }
            | E::PropagationFailure { .. }
            | E::SingularSystem { .. }
            | E::NoSolution
            | E::StrategyIncomplete { .. } => Self::Invariant(e.to_string()),
            _ => Self::Config(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
