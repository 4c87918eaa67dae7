use std::path::Path;

/// Failure of a CLI run. The variant decides the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    /// Unreadable or malformed input, or a parameter out of range (exit 1).
    #[error("{0}")]
    Input(String),
    /// A checked property failed on valid input (exit 2).
    #[error("invariant failure: {0}")]
    Invariant(String),
}

impl LabError {
    pub fn exit_code(&self) -> u8 {
        match self {
            LabError::Input(_) => 1,
            LabError::Invariant(_) => 2,
        }
    }

    pub fn parameter(name: &str, reason: impl std::fmt::Display) -> Self {
        LabError::Input(format!("invalid parameter `{name}`: {reason}"))
    }

    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        LabError::Input(format!("{}: {err}", path.display()))
    }

    pub fn at_line(path: &Path, line: u64, msg: impl std::fmt::Display) -> Self {
        LabError::Input(format!("{}:{line}: {msg}", path.display()))
    }
}

impl From<projlab_core::Error> for LabError {
    fn from(e: projlab_core::Error) -> Self {
        LabError::Input(e.to_string())
    }
}

pub type LabResult<T> = Result<T, LabError>;
