//! Command line driver for `ringclass-core`: argument and configuration
//! handling, eigenvalue table files and caches, and JSON/CSV output.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod forms;
pub mod output;
pub mod selftest;
pub mod table;

pub use cli::run;
pub use error::{CliError, Result};
