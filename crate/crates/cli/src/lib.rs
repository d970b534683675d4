//! Command-line front end for `symbounds`: bound reports, comparison tables,
//! Monte Carlo runs and exact rate checks.
//!
//! Exit codes: 0 success, 2 invalid flags, 3 output not writable,
//! 4 too many truncated Freedman paths, 5 exact computation over budget.

pub mod args;
pub mod commands;
pub mod error;
pub mod table;

use std::io::Write;

pub use args::Cli;
pub use commands::{cmd_compare, cmd_compute, cmd_simulate, cmd_verify_optimality, Output};
pub use error::CliError;

use args::Command;

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Compute(a) => cmd_compute(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::VerifyOptimality(a) => cmd_verify_optimality(a),
    }
}

/// Writes the output to its destination and returns the exit code.
pub fn emit(output: &Output) -> Result<i32, CliError> {
    match &output.out {
        Some(path) => std::fs::write(path, &output.text).map_err(|source| CliError::Io {
            path: Some(path.clone()),
            source,
        })?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(output.text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io { path: None, source })?;
        }
    }
    Ok(output.exit_code)
}
