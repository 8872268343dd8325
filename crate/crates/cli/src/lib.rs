//! Command-line front end for `fracdyn-core`.
//!
//! Subcommands `ml`, `certify`, `simulate` and `adapt` read strict TOML
//! configuration files and write CSV, JSON and plain-text artifacts. Exit
//! codes: 0 success, 1 computation failure, 2 parse error, 3 validation
//! error, 4 I/O failure.

pub mod artifacts;
pub mod cli;
pub mod commands;
pub mod config;
pub mod error;

pub use error::{CliError, CliResult};

use cli::{Cli, Command};

/// Runs one parsed invocation; text for stdout is returned.
pub fn run(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Ml(a) => commands::ml(a),
        Command::Certify(a) => {
            commands::certify_cmd(a).map(|_| format!("wrote {}\n", a.out.out.display()))
        }
        Command::Simulate(a) => {
            commands::simulate_cmd(a).map(|_| format!("wrote {}\n", a.out.out.display()))
        }
        Command::Adapt(a) => {
            commands::adapt_cmd(a).map(|_| format!("wrote {}\n", a.out.out.display()))
        }
    }
}
