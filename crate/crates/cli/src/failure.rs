use std::fmt;
use std::path::Path;

use optdg_core::{Error, SolveStatus, Stage};

pub const EXIT_UNSOLVED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

/// A command failure carrying its process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

pub type CliResult<T> = Result<T, Failure>;

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INTERNAL,
            message: message.into(),
        }
    }

    pub fn unsolved(status: SolveStatus) -> Self {
        Self {
            code: EXIT_UNSOLVED,
            message: format!("solve stage: no optimal solution ({status})"),
        }
    }

    pub fn write(path: &Path, err: impl fmt::Display) -> Self {
        Self::input(format!("cannot write {}: {err}", path.display()))
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let stage = err.stage();
        let code = match &err {
            Error::Unsolved(_) => EXIT_UNSOLVED,
            Error::Config(_) => EXIT_INPUT,
            _ if matches!(stage, Stage::Parse | Stage::Generate) => EXIT_INPUT,
            _ => EXIT_INTERNAL,
        };
        Self {
            code,
            message: format!("{stage} stage: {err}"),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}
