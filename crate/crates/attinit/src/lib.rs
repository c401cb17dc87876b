//! Experiment harness for the attitude initializer: built-in and file-based
//! experiment specs, parallel Monte Carlo execution, CSV outputs, plots and
//! the `attinit` command line.

pub mod cli;
pub mod config;
mod error;
pub mod output;
pub mod plot;
pub mod runner;

pub use config::ExperimentSpec;
pub use error::AppError;
