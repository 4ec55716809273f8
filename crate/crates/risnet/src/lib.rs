//! Experiment runner for the `risnet-core` analysis engine.
//!
//! [`config`] loads JSON experiment files, [`runner`] evaluates their sweeps
//! analytically and by Monte Carlo and writes CSV, and [`validation`] holds
//! the acceptance suite behind `risnet validate`.

pub mod config;
pub mod parallel;
pub mod runner;
pub mod validation;

pub use config::{load_config, parse_config, ConfigError, ExperimentConfig, Scenario};
pub use runner::{run_experiment, write_csv, ResultRow, RunError, RunOutput};
pub use validation::{CriterionReport, Suite, ValidationOptions};
