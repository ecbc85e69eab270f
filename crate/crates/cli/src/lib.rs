//! Command-line front end for `qi-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod svg;

pub use args::Cli;
pub use commands::run;
pub use error::CliError;
