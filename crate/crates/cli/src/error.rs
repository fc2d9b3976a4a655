use std::fmt;

use procrustes_core::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// Unparseable input, bad flags, unreadable or unwritable files.
    pub const USAGE: i32 = 2;
    /// Inputs parse but violate a mathematical precondition.
    pub const DOMAIN: i32 = 3;
    /// A spectrum that should be real came out complex.
    pub const COMPLEX_SPECTRUM: i32 = 4;
    pub const VALIDATION_FAILED: i32 = 5;
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: exit::USAGE,
            message: message.into(),
        }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        Self {
            code: exit::DOMAIN,
            message: message.into(),
        }
    }

    /// Attaches the offending input (usually a file name).
    pub fn context(mut self, what: &str) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_)
            | Error::NonFinite
            | Error::NotSquare { .. }
            | Error::NotSymmetric { .. }
            | Error::InvalidParameter(_) => exit::USAGE,
            Error::ComplexSpectrum { .. } => exit::COMPLEX_SPECTRUM,
            Error::ConvergenceFailure { .. }
            | Error::SingularBase { .. }
            | Error::NotPositiveSemidefinite { .. }
            | Error::DimensionError(_)
            | Error::DomainError(_)
            | Error::NumericalInconsistency { .. }
            | Error::NonSpdIntermediate { .. }
            | Error::UnsupportedKernel(_) => exit::DOMAIN,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::usage(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
