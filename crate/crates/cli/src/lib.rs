//! Scenario runner: JSON scenarios in, JSON reports out.

pub mod report;
pub mod run;
pub mod scenario;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Kernel(#[from] rnmod::Error),
}
