use std::path::PathBuf;

use thiserror::Error;

use crate::config::Diagnostics;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },

    #[error("invalid configuration:\n  {}", .0.0.join("\n  "))]
    Invalid(Diagnostics),

    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Numerical(#[from] qtunnel_core::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => 3,
            _ => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CliError::Syntax { .. } => "Syntax",
            CliError::Invalid(_) => "Config",
            CliError::Usage(_) => "Usage",
            CliError::Io { .. } => "Io",
            CliError::Numerical(e) => e.name(),
            CliError::Csv(_) => "Io",
        }
    }
}
