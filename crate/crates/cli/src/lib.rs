//! Command-line front end: config files, sweeps and bundled figure scenarios.

pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod scenarios;
pub mod sweep;

pub use config::Config;
pub use error::{CliError, CliResult};
pub use output::{Format, Table};
pub use run::{run_config, RunContext, Written};
