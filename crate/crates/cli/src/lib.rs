//! Experiment harness and command-line front end for `lmsample-core`.
//!
//! [`harness::run_experiment`] runs replications of "draw a sampling walk,
//! simulate the process at the walk times, estimate `d`" in parallel and
//! collects them in index order, so results do not depend on the thread
//! count. [`figures`] rebuilds the two simulation figures as CSV and SVG.

pub mod cli;
pub mod config;
pub mod error;
pub mod figures;
pub mod harness;
pub mod output;

pub use config::{parse_config, ExperimentConfig, Model};
pub use error::{CliError, Result};
pub use harness::{run_experiment, summarize, RunRecord, Summary};
