//! `kthprice`: bid tables, verification suites, identity checks and Monte
//! Carlo simulation for k-th price auctions with linear-density values.
//!
//! Exit status is 0 on success, 1 when a requested check fails, 2 for
//! configuration errors and 3 when quadrature does not converge.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fmt;

use clap::Parser;

use crate::config::{Cli, RunConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NON_CONVERGENCE: u8 = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    CheckFailed(String),
    NonConvergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::CheckFailed(_) => EXIT_CHECK_FAILED,
            CliError::NonConvergence(_) => EXIT_NON_CONVERGENCE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::CheckFailed(msg) => write!(f, "check failed: {msg}"),
            CliError::NonConvergence(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<kthprice_core::Error> for CliError {
    fn from(e: kthprice_core::Error) -> Self {
        match e {
            kthprice_core::Error::NonConvergence { .. } => CliError::NonConvergence(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("output: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Config(format!("output: {e}"))
    }
}

/// Parses `args`, runs the command and returns the process exit status.
/// Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match RunConfig::resolve(cli).and_then(|cfg| commands::execute(&cfg)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
