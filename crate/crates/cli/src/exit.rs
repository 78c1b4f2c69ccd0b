//! Exit-code contract: 0 success, 1 bound failure, 2 input error,
//! 3 run abort.

use std::fmt;
use std::path::Path;

use varimin::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    BoundFailure = 1,
    InputError = 2,
    Aborted = 3,
}

#[derive(Debug)]
pub struct CliError {
    pub code: ExitCode,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: ExitCode::InputError,
            message: message.into(),
        }
    }

    pub fn aborted(message: impl Into<String>) -> Self {
        Self {
            code: ExitCode::Aborted,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Self::input(format!("{}: {err}", path.display()))
    }

    /// Library errors raised while validating inputs.
    pub fn from_input(context: impl fmt::Display, err: Error) -> Self {
        Self::input(format!("{context}: {err}"))
    }

    /// Library errors raised mid-run.
    pub fn from_run(context: impl fmt::Display, err: Error) -> Self {
        Self::aborted(format!("{context}: {err}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}
