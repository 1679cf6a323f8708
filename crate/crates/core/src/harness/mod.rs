//! Configuration, sweep execution, caching, serialisation, figure presets and
//! the acceptance checks.

pub mod cache;
pub mod check;
pub mod config;
pub mod emit;
pub mod figures;
pub mod oracle;
pub mod sweep;

use thiserror::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("I/O error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl HarnessError {
    /// Process exit status associated with the error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Numerical(_) | HarnessError::Io { .. } => 3,
        }
    }
}
