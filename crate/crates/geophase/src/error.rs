use std::path::Path;

/// Failure of a CLI run, carrying the exit code it maps to.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad or missing configuration (exit 1).
    #[error("config error in `{path}`: {message}")]
    Config { path: String, message: String },

    /// A physics precondition or guard rejected the run (exit 2).
    #[error("{0}")]
    Guard(#[from] geophase_core::Error),

    /// A guard raised by the front-end itself (exit 2).
    #[error("{0}")]
    GuardMessage(String),

    /// The run completed but a validation scan regressed (exit 3).
    #[error("validation regression: {0}")]
    Regression(String),

    /// Writing output failed (exit 1).
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Prefixes a config diagnostic with the file it came from.
    pub fn in_file(self, file: &Path) -> Self {
        match self {
            Self::Config { path, message } => Self::Config {
                path: format!("{}: {path}", file.display()),
                message,
            },
            other => other,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config { .. } | Self::Io { .. } => 1,
            Self::Guard(_) | Self::GuardMessage(_) => 2,
            Self::Regression(_) => 3,
        }
    }
}
