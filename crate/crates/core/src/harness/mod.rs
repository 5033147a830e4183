//! Experiment orchestration: configuration, seeded runs and report files.

pub mod config;
pub mod report;
pub mod run;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{ExperimentConfig, ExperimentKind, FloquetConfig, QmlConfig, QrcConfig};
pub use report::{
    emit_report, read_attempts, reaggregate, summarize, AttemptRow, SummaryRow, TestPointRow,
};
pub use run::{run_case, run_fit_attempt, FitAttempt, FitReport, ReportBody, RunReport};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] crate::Error),

    #[error("attempt {attempt}: {message}")]
    Attempt { attempt: usize, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error(transparent)]
    CsvRecord(#[from] csv::Error),

    #[error("{0}")]
    Format(String),
}
