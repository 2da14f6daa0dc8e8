//! Command implementations behind the `parwalk` binary.

pub mod cnf;
pub mod commands;
pub mod model;
pub mod report;

pub use cnf::{parse_cnf, parse_cnf_str, Cnf};
pub use commands::{cmd_build, cmd_compare, cmd_spectrum, cmd_verify, Construction, Options};
pub use model::{AcceptanceKind, EnergySpec, ModelSpec, Source};
pub use report::Report;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{vars} variables exceed the dense cap of {cap} (use --counts-only or raise --max-n)")]
    TooManyVariables { vars: u32, cap: u32 },
    #[error("{0}")]
    Input(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("check failed [{kind}]: {source}", kind = .source.kind())]
    Check { source: parwalk::Error },
}

impl CliError {
    /// 1 for a failed verification, 2 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Check { .. } => 1,
            _ => 2,
        }
    }
}
