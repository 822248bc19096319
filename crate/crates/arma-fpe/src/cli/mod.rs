//! Command-line front end: config parsing, subcommand dispatch, and CSV/JSON
//! serialization of results.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{exit, run, Cli};
pub use config::RawConfig;
