//! Standard-library companion to the simulation kernels: file formats,
//! flat-key JSON configuration, a deterministic thread-pool runner, and the
//! error-to-exit-code policy shared by the command-line interface.

pub mod config;
pub mod formats;
pub mod runner;

use std::fmt;

/// Errors surfaced by the command-line layer, split by exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Malformed invocation or input file (exit code 2).
    Config(String),
    /// A valid invocation asking for something the library refuses, such as
    /// an out-of-range dimension or too few events (exit code 3).
    Precondition(String),
    /// A broken internal law; always a bug (exit code 1).
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Internal(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Precondition(m) => write!(f, "{m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<softplex_core::Error> for CliError {
    fn from(e: softplex_core::Error) -> Self {
        match e {
            softplex_core::Error::Precondition(m) => CliError::Precondition(m),
            softplex_core::Error::InsufficientEvents { .. } => {
                CliError::Precondition(e.to_string())
            }
            softplex_core::Error::Invariant(m) => CliError::Internal(m),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
