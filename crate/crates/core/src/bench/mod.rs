//! Experiment harness behind the `paging-lab` binary.

pub mod config;
pub mod generate;
pub mod run;
pub mod verify;
pub mod workload;

pub use config::ExperimentConfig;
pub use run::{
    lower_bound_experiment, run_experiment, sweep_eta, LowerBoundRow, ResultRow, RunOptions,
};
pub use verify::{SuiteResult, VerifySizes};
pub use workload::{Noise, Workload};
