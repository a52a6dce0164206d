//! CLI error classes and their process exit codes.

use std::fmt;

/// Exit codes: 0 success, 2 validation error, 3 infeasible parameters,
/// 4 I/O or parse error.
#[derive(Debug)]
pub enum CliError {
    /// Bad input data or arguments (exit 2).
    Validation(String),
    /// Mixing-matrix parameters with no feasible dyad probabilities (exit 3).
    Infeasible(String),
    /// File system or file format failures (exit 4).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn io(msg: impl Into<String>) -> Self {
        CliError::Io(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Infeasible(m) | CliError::Io(m) => {
                write!(f, "{m}")
            }
        }
    }
}

impl From<rds_ss::Error> for CliError {
    fn from(e: rds_ss::Error) -> Self {
        match &e {
            rds_ss::Error::InfeasibleParams { .. } => CliError::Infeasible(e.to_string()),
            rds_ss::Error::Scenario { source, .. }
                if matches!(**source, rds_ss::Error::InfeasibleParams { .. }) =>
            {
                CliError::Infeasible(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
