//! Library surface of the experiment harness, shared by the binary and
//! the test suites.

pub mod config;
pub mod digest;
pub mod experiment;
pub mod report;

pub use config::{ExperimentConfig, UsageError};
pub use experiment::{
    assemble_bound_params, evaluate_bounds, run_experiment, write_trajectory_csv, CheckResult,
    RunManifest, RunOutcome, CSV_HEADER,
};
pub use report::{emit_report, read_trajectory_csv, ReportSeries};
