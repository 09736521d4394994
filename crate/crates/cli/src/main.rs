//! `emtr`: simulate faults on a line network and locate them by
//! electromagnetic time reversal.
//!
//! Exit codes: 0 on success, 2 when the simulated record holds no fault
//! transient, 1 on any configuration or I/O error (including bad flags).

mod args;
mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap's own usage-error code is 2, which is reserved here for
            // "no transient detected".
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match cli.command {
        Command::Locate(a) => commands::locate(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Decompose(a) => commands::decompose(a),
        Command::Campaign(a) => commands::campaign(a),
    };
    match result {
        Ok(commands::Outcome::Done) => ExitCode::SUCCESS,
        Ok(commands::Outcome::NoTransient) => {
            eprintln!("no transient detected at the observation node");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
