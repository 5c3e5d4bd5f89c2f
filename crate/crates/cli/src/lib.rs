//! Command-line driver for `radbif-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cache;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use error::{exit, CliError, Result};
