//! `certideld report`: merges JSON reports into one CSV sweep.

use std::path::PathBuf;

use certideld_core::harness::{merge_reports, ExperimentReport};
use clap::Args;

use crate::{write_output, CliError, CliResult};

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Report files, each holding one report or an array of them. Later
    /// files win on duplicate (op, scheme, adversary, mode, λ).
    files: Vec<PathBuf>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub const CSV_HEADER: [&str; 17] = [
    "op",
    "scheme",
    "adversary",
    "lambda",
    "mode",
    "td",
    "accept0",
    "accept1",
    "pi_value",
    "pi_bound",
    "advt0",
    "advt1",
    "advt2",
    "runtime_ms",
    "seed",
    "version",
    "all_hold",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn to_csv(reports: &[ExperimentReport]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::data(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in reports {
        let h = r.hybrids;
        w.write_record([
            r.op.clone(),
            r.scheme.to_string(),
            r.adversary.clone(),
            r.lambda.to_string(),
            r.mode.to_string(),
            opt(r.td),
            opt(r.accept0),
            opt(r.accept1),
            opt(r.pi_value),
            opt(r.pi_bound),
            opt(h.map(|h| h.advt0)),
            opt(h.map(|h| h.advt1)),
            opt(h.map(|h| h.advt2)),
            opt(r.runtime_ms),
            r.seed.to_string(),
            r.version.clone(),
            r.all_hold().to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::data(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::data(e.to_string()))
}

fn load(path: &PathBuf) -> CliResult<Vec<ExperimentReport>> {
    let bad = |e: String| CliError::data(format!("{}: {e}", path.display()));
    let text = std::fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    let value = if value.is_array() { value } else { serde_json::Value::Array(vec![value]) };
    serde_json::from_value(value).map_err(|e| bad(e.to_string()))
}

pub fn run(a: ReportArgs) -> CliResult<u8> {
    let mut all = Vec::new();
    for f in &a.files {
        all.extend(load(f)?);
    }
    let merged = merge_reports(all);
    write_output(a.out.as_ref(), &to_csv(&merged)?)?;
    eprintln!("{} rows", merged.len());
    Ok(0)
}
