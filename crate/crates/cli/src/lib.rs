//! Command-line front end: configuration resolution, the subcommand
//! pipelines and their report files.
//!
//! Every run writes `manifest.json` in the output directory with the resolved
//! parameters. Reports contain no timestamps or absolute paths, so identical
//! inputs give byte-identical files.

pub mod cli;
mod commands;
pub mod config;
pub mod output;

pub use cli::Cli;
pub use commands::{run, Outcome};
