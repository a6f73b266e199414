//! Command-line front end for `magcap-core`.

use std::io::Write;

pub mod args;
mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{sweep_rows, SweepRow};

use args::{Cli, Command};
use error::CliResult;

fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Capacity(a) => commands::capacity(a, stdout),
        Command::Simulate(a) => commands::simulate(a, stdout, stderr),
        Command::Verify(a) => commands::verify(a, stdout),
        Command::Sweep(a) => commands::sweep(a, stdout),
        Command::Area(a) => commands::area(a, stdout),
        Command::Mane(a) => commands::mane(a, stdout),
    }
}

/// Run a parsed command line and return the process exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match dispatch(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
