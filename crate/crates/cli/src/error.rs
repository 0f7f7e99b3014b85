use std::fmt;

use pattern_spectra::Error;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or arguments.
    Usage(String),
    Lib(Error),
    /// An eigenpair residual above `--tol`.
    Residual {
        eigenvalue: String,
        residual: f64,
        tol: f64,
    },
}

impl CliError {
    /// 2 for anything the user typed, 3 when a solver failed to converge.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Residual { .. } => 3,
            CliError::Lib(e) => match e {
                Error::Parse { .. }
                | Error::InvalidPattern(_)
                | Error::DuplicateValue { .. }
                | Error::ArityMismatch { .. }
                | Error::TooShort(_)
                | Error::InvalidGrid(_)
                | Error::InvalidParameter(_) => 2,
                Error::NotDominated | Error::NoConvergence(_) | Error::DegenerateOperator => 3,
                _ => 1,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Residual { eigenvalue, residual, tol } => {
                write!(f, "eigenvalue {eigenvalue} has residual {residual:e} above --tol {tol:e}")
            }
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Lib(e.into())
    }
}
