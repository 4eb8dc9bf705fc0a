//! Command-line verification harness over `caplab-core`.

#![forbid(unsafe_code)]

pub mod cli;
pub mod run;
pub mod suites;
pub mod walkthrough;

use std::path::PathBuf;

pub use run::{run_suite, Format, RunManifest, RunOutcome};
pub use suites::{Settings, Suite};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("{task}: {source}")]
    Check {
        task: &'static str,
        source: caplab_core::Error,
    },
    #[error(transparent)]
    Core(#[from] caplab_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Exit statuses.
pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
