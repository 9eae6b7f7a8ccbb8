//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by model construction, simulation, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument violated a precondition.
    #[error("invalid parameter {name}: {reason} (got {value})")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
        value: f64,
    },

    /// A requested year is not covered by the loaded data.
    #[error("data gap: no {what} for {economy}/{building_type} in year {year}")]
    DataGap {
        what: &'static str,
        economy: String,
        building_type: String,
        year: i32,
    },

    /// Configuration is incomplete or inconsistent.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// An input file failed to parse. Carries the file and 1-based line.
    #[error("parse error in {file} line {line}: {message}")]
    Parse {
        file: String,
        line: u64,
        message: String,
    },

    /// A loaded dataset does not cover a requested economy or type.
    #[error("coverage error: {0}")]
    Coverage(String),

    /// Two results cannot be compared.
    #[error("invalid comparison: {0}")]
    InvalidComparison(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn invalid(name: &'static str, reason: &'static str, value: f64) -> Self {
        Error::InvalidParameter {
            name,
            reason,
            value,
        }
    }

    /// Process exit code this error maps to: 2 for I/O, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
