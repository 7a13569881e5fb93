//! `certideld`: protocol demos, exact harness sweeps and report merging.
//!
//! Exit codes: 0 success, 1 an asserted bound failed, 2 usage, 3 resource
//! budget exceeded, 4 malformed data.

mod demo;
mod harness;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use certideld_core::adversary::BuiltinAdversary;
use certideld_core::harness::{Mode, Scheme};
use certideld_core::Error;
use clap::{Parser, Subcommand, ValueEnum};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 7;

#[derive(Parser, Debug)]
#[command(name = "certideld", version, about = "Certified deletion toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one honest protocol instance and print its trace.
    Demo(demo::DemoArgs),
    /// Exact harness runs over a list of λ.
    Harness(harness::HarnessArgs),
    /// Merge JSON reports into one CSV sweep.
    Report(report::ReportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self { code: 4, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Input(_) => 2,
            Error::Resource(_) => 3,
            Error::Format(_) => 4,
            _ => 1,
        };
        Self { code, message: e.to_string() }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

pub fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

pub fn parse_adversary(s: &str) -> Result<BuiltinAdversary, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

pub fn write_output(out: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::data(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Sizes the global rayon pool from `CERTIDELD_THREADS`, if set.
fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("CERTIDELD_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage(format!("CERTIDELD_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError { code: 1, message: e.to_string() })
}

fn run(cli: Cli) -> CliResult<u8> {
    configure_threads()?;
    match cli.command {
        Command::Demo(a) => demo::run(a),
        Command::Harness(a) => harness::run(a),
        Command::Report(a) => report::run(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
