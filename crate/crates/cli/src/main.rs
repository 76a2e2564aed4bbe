//! `gaborflow` command-line front end.

mod args;
mod commands;
mod stack;

use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::Parser;

use args::{Cli, Command};

const THREADS_VAR: &str = "GABORFLOW_THREADS";

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| gaborflow::Error::InvalidParams(format!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring the thread pool")
}

fn run(cli: Cli) -> anyhow::Result<()> {
    configure_threads()?;
    let start = Instant::now();
    let report_path = cli.report.clone();
    let mut report = match cli.command {
        Command::Chirp(a) => commands::chirp(a)?,
        Command::Gabor(a) => commands::gabor(a)?,
        Command::Reassign(a) => commands::reassign(a)?,
        Command::Diffuse(a) => commands::diffuse(a)?,
        Command::ChirpOracle(a) => commands::chirp_oracle(a)?,
        Command::Freqfield(a) => commands::freqfield(a)?,
        Command::Defnet(a) => commands::defnet(a)?,
        Command::Phantom(a) => commands::phantom(a)?,
        Command::Render(a) => commands::render(a)?,
    };
    report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    if let Some(path) = report_path {
        gaborflow::io::write_json(&path, &report)?;
    }
    Ok(())
}

/// 2 for bad input (flags, files, parameters), 1 for anything that failed
/// during the computation itself.
fn exit_code(err: &anyhow::Error) -> u8 {
    let validation = err
        .chain()
        .find_map(|e| e.downcast_ref::<gaborflow::Error>())
        .is_some_and(gaborflow::Error::is_validation);
    if validation {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
