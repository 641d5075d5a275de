//! Experiment harness for the degree-recency-biased preferential attachment model:
//! grid runner, CSV and JSON emitters, and the `drpa` command line.

pub mod cli;
pub mod config;
pub mod emit;
pub mod error;
pub mod figures;
pub mod runner;
pub mod seeds;

pub use config::{ExperimentConfig, FitMode, OutputConfig};
pub use error::{HarnessError, Result};
pub use figures::Figure;
pub use runner::{run_experiment, AggregateReport};
