//! Batch runner: every `*.json` spec in a directory gets `analyze`,
//! `an-check` and `oracle-compare`, with one report per file written next
//! to it as `<stem>.report.json`.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::report::bound_violations;
use crate::{commands, load, render, to_value, write_atomic, Cli, CliError, Outcome, EXIT_NUMERICAL, EXIT_PARSE};

pub const REPORT_SUFFIX: &str = ".report.json";

#[derive(Debug, Serialize)]
struct FileResults {
    analyze: commands::AnalyzeReport,
    an_check: commands::AnReport,
    oracle: commands::OracleReport,
}

#[derive(Debug, Serialize)]
pub struct FileSummary {
    pub file: String,
    pub status: &'static str,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<CliError>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub bound_violations: Vec<String>,
    pub undecided: bool,
}

#[derive(Debug, Serialize)]
struct SuiteResults {
    files: Vec<FileSummary>,
    passed: usize,
    failed: usize,
}

fn spec_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::parse(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            p.is_file() && name.ends_with(".json") && !name.ends_with(REPORT_SUFFIX) && !name.starts_with('.')
        })
        .collect();
    files.sort();
    Ok(files)
}

fn report_path(spec: &Path) -> PathBuf {
    let name = spec.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    spec.with_file_name(format!("{}{REPORT_SUFFIX}", name.trim_end_matches(".json")))
}

fn one(path: &Path, cli: &Cli) -> FileSummary {
    let file = path.display().to_string();
    let failed = |error: CliError| FileSummary {
        file: file.clone(),
        status: "error",
        exit_code: error.exit_code,
        report: None,
        error: Some(error),
        bound_violations: Vec::new(),
        undecided: false,
    };
    let run = || -> Result<(serde_json::Value, bool), CliError> {
        let input = load(path)?;
        let t = &input.op;
        let analyze = commands::analyze(t, cli.tol, cli.window)?;
        let an_check = commands::an(t, cli.tol, cli.window)?;
        let oracle = commands::oracle_compare(t, t.block_size() + cli.window, cli.tol, cli.window, cli.seed)?;
        let undecided = an_check.undecided() || analyze.norm.attained == "undecided";
        let consistent = oracle.consistent;
        let value = to_value(vec!["suite".into(), file.clone()], vec![input.digest], cli, FileResults { analyze, an_check, oracle });
        if !consistent {
            return Err(CliError {
                kind: "numerical".into(),
                message: "engine and dense oracle disagree".into(),
                exit_code: EXIT_NUMERICAL,
            });
        }
        Ok((value, undecided))
    };
    let (value, undecided) = match run() {
        Ok(v) => v,
        Err(e) => return failed(e),
    };
    let out = report_path(path);
    if let Err(e) = write_atomic(&out, &render(&value)) {
        return failed(CliError { kind: "io".into(), message: format!("{}: {e}", out.display()), exit_code: EXIT_PARSE });
    }
    let violations = bound_violations(&value, cli.tol);
    let ok = violations.is_empty();
    FileSummary {
        file,
        status: if ok { "ok" } else { "bound_exceeded" },
        exit_code: if ok { 0 } else { EXIT_NUMERICAL },
        report: Some(out.display().to_string()),
        error: None,
        bound_violations: violations,
        undecided,
    }
}

pub fn run_suite(dir: &Path, cli: &Cli) -> Result<Outcome, CliError> {
    let files = spec_files(dir)?;
    let summaries: Vec<FileSummary> = files.par_iter().map(|p| one(p, cli)).collect();
    let failure = summaries.iter().map(|s| s.exit_code).find(|&c| c != 0);
    let undecided = summaries.iter().any(|s| s.undecided);
    let failed = summaries.iter().filter(|s| s.exit_code != 0).count();
    let results = SuiteResults { passed: summaries.len() - failed, failed, files: summaries };
    let report = to_value(vec!["suite".into(), dir.display().to_string()], Vec::new(), cli, results);
    Ok(Outcome { report, undecided, failure })
}
