//! `frozen-edge` command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 domain, 3 check failed, 4 tuning.

mod args;
mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use frozen_edge::Error;

use args::{Cli, Command};

const EXIT_USAGE: u8 = 1;
const EXIT_DOMAIN: u8 = 2;
const EXIT_CHECK_FAILED: u8 = 3;
const EXIT_TUNING: u8 = 4;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Domain(_) | Error::Dimension(_) => EXIT_DOMAIN,
        Error::Tuning { .. } => EXIT_TUNING,
        Error::Io(_) | Error::Json(_) => EXIT_USAGE,
        // numerical safeguards that tripped
        _ => EXIT_CHECK_FAILED,
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("FROZEN_EDGE_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("FROZEN_EDGE_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }

    let outcome = match &cli.command {
        Command::Zeros(a) => commands::zeros(a),
        Command::Cov(a) => commands::cov(a),
        Command::Limit(a) => commands::limit(a),
        Command::Converge(a) => commands::converge(a),
        Command::Sample(a) => commands::sample(a),
    };
    match outcome {
        Ok(code) => {
            if code != commands::EXIT_OK {
                eprintln!("check failed; see check_passed in the output metadata");
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
