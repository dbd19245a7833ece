//! Configuration, output formats and subcommand drivers around [`pairsim_core`].
//!
//! Every subcommand is deterministic given its configuration, which includes the seed.
//! Output files start with a `#` line carrying the configuration hash, the seed and the
//! column names with unit suffixes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
mod error;
pub mod output;

pub use error::CliError;
