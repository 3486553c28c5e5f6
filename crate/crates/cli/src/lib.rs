//! Experiment runner for the `nhrmt` toolkit.

pub mod compare;
pub mod config;
pub mod error;
pub mod run;

pub use compare::{compare_files, compare_tables, CompareReport};
pub use config::{Experiment, ExperimentConfig, GridSpec, PartialConfig, Scale};
pub use error::{CliError, Result};
pub use run::{run_experiment, run_nlsm_eval, run_sample, RunManifest};
