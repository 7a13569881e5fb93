//! `certideld harness`: exact experiment runs, one report per λ.

use std::path::PathBuf;
use std::time::Instant;

use certideld_core::adversary::BuiltinAdversary;
use certideld_core::harness::{non_increasing, ExperimentReport, Mode, Scheme};
use certideld_core::Exec;
use clap::{Args, ValueEnum};

use crate::report::to_csv;
use crate::{parse_adversary, parse_mode, parse_scheme, write_output, CliError, CliResult, Format, DEFAULT_SEED};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Op {
    /// TD(EV-EXP(0), EV-EXP(1)).
    Td,
    /// Advantages of the three hybrids on the compiled scheme.
    Hybrids,
    /// Probability of the Hadamard-position projector.
    Pi,
    /// TD(C-EXP(0), C-EXP(1)).
    Cexp,
}

#[derive(Args, Debug)]
pub struct HarnessArgs {
    #[arg(long, value_enum)]
    op: Op,
    #[arg(long, default_value = "secret-sharing", value_parser = parse_scheme)]
    scheme: Scheme,
    #[arg(long, default_value = "comp-cheater", value_parser = parse_adversary)]
    adversary: BuiltinAdversary,
    /// Comma-separated list of λ values.
    #[arg(long, value_delimiter = ',', default_value = "2,4")]
    lambda: Vec<usize>,
    #[arg(long, default_value = "idealized-hiding", value_parser = parse_mode)]
    mode: Mode,
    /// Recorded in every report.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write reports here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Record wall-clock time per report. Makes output non-reproducible.
    #[arg(long)]
    timing: bool,
    /// Enumerate on the calling thread only.
    #[arg(long)]
    sequential: bool,
}

fn one(a: &HarnessArgs, lambda: usize, exec: Exec) -> CliResult<ExperimentReport> {
    if a.op != Op::Td && a.mode != Mode::IdealizedHiding {
        return Err(CliError::usage("only --op td supports --mode real-backend"));
    }
    let start = Instant::now();
    let mut r = match a.op {
        Op::Td => ExperimentReport::td(a.scheme, a.adversary, lambda, a.mode, a.seed, exec)?,
        Op::Hybrids => ExperimentReport::hybrids(a.adversary, lambda, a.seed, exec)?,
        Op::Pi => ExperimentReport::pi(a.adversary, lambda, a.seed, exec)?,
        Op::Cexp => ExperimentReport::c_exp(a.scheme, a.adversary, lambda, a.seed, exec)?,
    };
    if a.timing {
        r.runtime_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(r)
}

fn describe(r: &ExperimentReport) -> String {
    let mut s = format!("{} {} {} λ={}", r.op, r.scheme, r.adversary, r.lambda);
    for (name, v) in [("td", r.td), ("pi", r.pi_value)] {
        if let Some(v) = v {
            s.push_str(&format!(" {name}={v:.6e}"));
        }
    }
    if let Some(h) = r.hybrids {
        s.push_str(&format!(" advt=({:.6e}, {:.6e}, {:.6e})", h.advt0, h.advt1, h.advt2));
    }
    let failed: Vec<&str> = r.checks.iter().filter(|c| !c.holds).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        s.push_str(" ok");
    } else {
        s.push_str(&format!(" FAILED {}", failed.join(",")));
    }
    s
}

pub fn run(a: HarnessArgs) -> CliResult<u8> {
    if a.lambda.is_empty() {
        return Err(CliError::usage("--lambda needs at least one value"));
    }
    let exec = if a.sequential { Exec::Sequential } else { Exec::Parallel };
    let mut reports = Vec::with_capacity(a.lambda.len());
    for &lambda in &a.lambda {
        let r = one(&a, lambda, exec)?;
        eprintln!("{}", describe(&r));
        reports.push(r);
    }
    let mut ok = reports.iter().all(ExperimentReport::all_hold);

    if a.op == Op::Td && reports.len() > 1 {
        let mut sweep: Vec<(usize, f64)> = reports.iter().map(|r| (r.lambda, r.td.unwrap_or(0.0))).collect();
        sweep.sort_by_key(|p| p.0);
        sweep.dedup_by_key(|p| p.0);
        let td: Vec<f64> = sweep.iter().map(|p| p.1).collect();
        let check = non_increasing("td-non-increasing", &td);
        eprintln!("sweep: td non-increasing in λ {}", if check.holds { "ok" } else { "FAILED" });
        ok &= check.holds;
    }

    let text = match a.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&reports).map_err(|e| CliError::data(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => to_csv(&reports)?,
    };
    write_output(a.out.as_ref(), &text)?;
    Ok(if ok { 0 } else { 1 })
}
