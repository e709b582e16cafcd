//! Command-line front end: TOML documents, reports and subcommands.

pub mod commands;
pub mod document;
pub mod report;

pub use commands::run;
