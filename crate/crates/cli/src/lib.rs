//! Command-line front end: argument parsing, data ingestion and report
//! rendering on top of the `cmnb` library.

pub mod args;
pub mod commands;
pub mod error;
pub mod fit;
pub mod ingest;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use serde::Serialize;

use args::{Cli, Command, Format};
use error::{exit, CliError};

fn encode<T: Serialize>(
    value: &T,
    format: Format,
    text: impl FnOnce(&T) -> String,
) -> Result<String, CliError> {
    Ok(match format {
        Format::Text => text(value),
        Format::Json => serde_json::to_string_pretty(value)? + "\n",
    })
}

/// Runs a parsed command; returns the report and the exit code it implies.
pub fn execute(cli: &Cli) -> Result<(String, u8), CliError> {
    let f = cli.format;
    let ok = |s: String| (s, exit::SUCCESS);
    Ok(match &cli.command {
        Command::Fit(a) => {
            let report = fit::run_fit(a)?;
            let code = if report.all_converged() {
                exit::SUCCESS
            } else {
                exit::NUMERICAL
            };
            (encode(&report, f, fit::render_text)?, code)
        }
        Command::Sample(a) => {
            let t = commands::run_sample(a)?;
            ok(encode(&t, f, |t| commands::render_sample(t.as_ref()))?)
        }
        Command::Analyze(a) => ok(encode(
            &commands::run_analyze(a)?,
            f,
            commands::render_analyze,
        )?),
        Command::Limits(a) => ok(encode(
            &commands::run_limits(a)?,
            f,
            commands::render_limits,
        )?),
        Command::Pmf(a) => ok(encode(&commands::run_pmf(a)?, f, |r| {
            commands::render_pmf(r)
        })?),
    })
}

fn write_report(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Entry point; returns the process exit code.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                exit::INPUT
            } else {
                exit::SUCCESS
            };
        }
    };
    match execute(&cli).and_then(|(text, code)| write_report(&cli, &text).map(|_| code)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
