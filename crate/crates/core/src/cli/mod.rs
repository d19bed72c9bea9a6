//! Scenario files, single runs, sweeps and the report formats behind the
//! `dqs` binary.

mod scenario;
mod sweep;

pub use scenario::{run_scenario, OutputSpec, RunSummary, ScenarioFile, SweepSpec, SweepVariable};
pub use sweep::{point_seed, run_equivalence_grid, run_sweep, write_csv, ReportRow, CSV_COLUMNS};

use thiserror::Error;

use crate::error::DqsError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_ABORTED: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("scenario error: {0}")]
    Schema(String),
    #[error(transparent)]
    Dqs(#[from] DqsError),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) | CliError::Dqs(_) => EXIT_SCHEMA,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            CliError::Io(e.to_string())
        } else {
            CliError::Schema(e.to_string())
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
