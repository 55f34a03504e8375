use std::path::Path;

/// Process exit status.
pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad file, bad field, or bad argument.
    #[error("{location}: {message}")]
    Input { location: String, message: String },
    #[error(transparent)]
    Core(#[from] skewcoh_core::Error),
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}

impl CliError {
    pub fn input(path: &Path, message: impl Into<String>) -> Self {
        CliError::Input {
            location: path.display().to_string(),
            message: message.into(),
        }
    }

    pub fn argument(flag: &str, message: impl Into<String>) -> Self {
        CliError::Input {
            location: flag.to_string(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(skewcoh_core::Error::ZeroSensitivityAncilla(_)) => EXIT_DEGENERATE,
            _ => EXIT_INPUT,
        }
    }
}
