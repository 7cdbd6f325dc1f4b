//! Run configuration files, result files and the drivers behind the CLI.
//!
//! All numbers in CSV files are written with 17 significant digits; the JSON
//! summary uses shortest round-trip formatting. Both parse back to the same
//! `f64`.

mod config;
mod output;
mod run;
mod summary;

pub use config::{OutputConfig, RunConfig, DEFAULT_SNAPSHOT_TIMES};
pub use output::{interpolate, write_history_csv, write_snapshots, write_trajectory_csv};
pub use run::{
    run_solve, run_sweep, run_verify, SolveRun, CHECKS_FILE, FAILURE_FILE, HISTORY_FILE, SUMMARY_FILE, TRAJECTORY_FILE,
};
pub use summary::RunSummary;
