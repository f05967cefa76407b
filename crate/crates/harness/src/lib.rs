//! Seeded Monte Carlo runner for RCSM index detection: per-trial
//! simulation, parameter sweeps, runtime benchmarks and CSV output.

pub mod config;
pub mod report;
pub mod stats;
pub mod sweep;
pub mod trial;

use std::path::PathBuf;

pub use config::{DetectorKind, ExperimentConfig, Sweep, SweepParam};
pub use report::SweepRow;
pub use trial::{run_trial, TrialResult};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("trial {trial_id}: {source}")]
    Trial {
        trial_id: u64,
        #[source]
        source: rcsm_core::Error,
    },
    #[error(transparent)]
    Core(#[from] rcsm_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T> = std::result::Result<T, HarnessError>;
