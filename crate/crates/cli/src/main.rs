//! `varimin`: curvature estimation, bound certification and constrained
//! curvature-energy minimization for discrete varifolds.
//!
//! Exit codes: 0 success, 1 bound failure, 2 input error, 3 run abort.
//! `VARIMIN_THREADS` caps the worker threads.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod check;
mod config;
mod curvature;
mod exit;
mod manifest;
mod minimize;
mod report;

use std::path::Path;

use clap::{Parser, Subcommand};
use serde::Serialize;

use exit::{CliError, ExitCode};

#[derive(Parser, Debug)]
#[command(
    name = "varimin",
    version,
    about = "Discrete varifold curvature, bounds and minimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate the weak mean curvature (and optionally B and A) of a mesh.
    Curvature(curvature::CurvatureArgs),
    /// Certify the monotonicity, fundamental and diameter/mass bounds.
    Check(check::CheckArgs),
    /// Minimize a curvature energy inside a compact subset of R^3.
    Minimize(minimize::MinimizeArgs),
    /// Verify a run directory against its manifest and emit plot data.
    Report(report::ReportArgs),
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("summary serializes");
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

pub(crate) fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("summary serializes"));
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("VARIMIN_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::input(format!("VARIMIN_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::input(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    configure_threads()?;
    match cli.command {
        Command::Curvature(a) => curvature::run(&a).map(|_| ExitCode::Success),
        Command::Check(a) => check::run(&a),
        Command::Minimize(a) => minimize::run(&a),
        Command::Report(a) => report::run(&a),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { ExitCode::InputError as i32 } else { 0 });
        }
    };
    let code = match run(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    };
    std::process::exit(code as i32);
}
