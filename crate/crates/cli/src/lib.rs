//! Config-driven front end: wave profiles, stability reports and parameter
//! scans written as JSON and CSV.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{cmd_profile, cmd_scan, cmd_stability, run, CliError, Command, RunOptions};
pub use config::RunConfig;
