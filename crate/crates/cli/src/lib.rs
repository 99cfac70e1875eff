//! Command-line driver: reads operator spec files, runs one analysis and
//! emits a JSON report.
//!
//! Exit codes: 0 ok, 2 parse error, 3 precondition error, 4 numerical
//! failure, 5 undecided verdict under `--strict`.

pub mod commands;
pub mod report;
pub mod suite;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};
use spectrakit::{Complex, Error, Operator};

use crate::commands::CommutatorMode;
use crate::report::{InputDigest, Report, Tolerances};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;
pub const EXIT_UNDECIDED: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "spectrakit", version, about = "Certified spectral analysis of scalar + compact-diagonal + finite-block operators")]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    /// Comparison tolerance.
    #[arg(long, global = true, env = "SPECTRAKIT_TOL", default_value_t = spectrakit::DEFAULT_TOL)]
    pub tol: f64,
    /// Also write the report to this file.
    #[arg(long, global = true, value_name = "OUT")]
    pub json: Option<PathBuf>,
    /// Seed for randomized probes.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of tail eigenvalues listed in spectra.
    #[arg(long, global = true, default_value_t = spectrakit::spectral::DEFAULT_WINDOW)]
    pub window: usize,
    /// Exit with status 5 when a verdict is undecided.
    #[arg(long, global = true)]
    pub strict: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classification, norm, minimum modulus and spectrum window.
    Analyze { file: PathBuf },
    /// AN verdict with the (K, F, alpha) triple or the offending eigenvalues.
    AnCheck { file: PathBuf },
    /// Commutator-norm maximizers.
    #[command(group(ArgGroup::new("mode").required(true).args(["single", "pair", "sandwich"])))]
    Commutator {
        /// X maximizing `||EX - XE||` over contractions.
        #[arg(long, value_name = "FILE")]
        single: Option<PathBuf>,
        /// X maximizing `||SX - XT||` for a phase-matched pair.
        #[arg(long, num_args = 2, value_names = ["S", "T"])]
        pair: Option<Vec<PathBuf>>,
        /// Rank-one X with `||SXT|| = ||S|| ||T||`.
        #[arg(long, num_args = 2, value_names = ["S", "T"])]
        sandwich: Option<Vec<PathBuf>>,
    },
    /// Norm-attaining perturbation of the normalized operator.
    Attainify {
        file: PathBuf,
        /// Allowed distance from the normalized operator, in (0, 2).
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        /// Target value `RE` or `RE,IM`; defaults to the essential point.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        beta: Option<Complex>,
    },
    /// Cross-check against dense finite sections.
    OracleCompare {
        file: PathBuf,
        /// Size of the dense section (raised to the block size if smaller).
        #[arg(long)]
        dim: usize,
    },
    /// Batch run over every `*.json` spec in a directory.
    Suite { dir: PathBuf },
}

fn parse_complex(s: &str) -> Result<Complex, String> {
    let mut parts = s.split(',');
    let re = parts.next().unwrap_or("").trim().parse::<f64>().map_err(|e| e.to_string())?;
    let im = match parts.next() {
        Some(p) => p.trim().parse::<f64>().map_err(|e| e.to_string())?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err("expected RE or RE,IM".into());
    }
    Ok(Complex::new(re, im))
}

/// Failure of a command, carrying its exit code.
#[derive(Debug, Clone, Serialize)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    fn parse(message: String) -> Self {
        Self { kind: "parse".into(), message, exit_code: EXIT_PARSE }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (kind, exit_code) = match &e {
            Error::Parse { .. } | Error::MalformedEnvelope { .. } | Error::NonvanishingTail { .. } | Error::BadBlock { .. } => {
                ("parse", EXIT_PARSE)
            }
            Error::NoConvergence { .. } | Error::PostconditionFailed { .. } | Error::NoWitnessFound(_) => {
                ("numerical", EXIT_NUMERICAL)
            }
            _ => ("precondition", EXIT_PRECONDITION),
        };
        Self { kind: kind.into(), message: e.to_string(), exit_code }
    }
}

/// Result of a successful run.
#[derive(Debug)]
pub struct Outcome {
    pub report: serde_json::Value,
    pub undecided: bool,
    /// Nonzero exit code for a run that still produced a report.
    pub failure: Option<i32>,
}

pub(crate) struct Input {
    pub op: Operator,
    pub digest: InputDigest,
}

pub(crate) fn load(path: &Path) -> Result<Input, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    let op = spectrakit::io::parse_spec(text).map_err(|e| {
        let mut c = CliError::from(e);
        c.message = format!("{}: {}", path.display(), c.message);
        c.kind = "parse".into();
        c.exit_code = EXIT_PARSE;
        c
    })?;
    let digest = InputDigest { path: path.display().to_string(), sha256: hex::encode(Sha256::digest(&bytes)) };
    Ok(Input { op, digest })
}

pub(crate) fn to_value<T: Serialize>(
    command: Vec<String>,
    inputs: Vec<InputDigest>,
    cli: &Cli,
    results: T,
) -> serde_json::Value {
    let tolerances = Tolerances { tol: cli.tol, window: cli.window, seed: cli.seed };
    serde_json::to_value(Report { command, inputs, tolerances, results }).expect("reports are serializable")
}

fn echo(name: &str, rest: &[String]) -> Vec<String> {
    std::iter::once(name.to_string()).chain(rest.iter().cloned()).collect()
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(CliError { kind: "precondition".into(), message: format!("tolerance must be positive, got {}", cli.tol), exit_code: EXIT_PRECONDITION });
    }
    let (tol, window) = (cli.tol, cli.window);
    let (report, undecided) = match &cli.command {
        Command::Analyze { file } => {
            let i = load(file)?;
            let r = commands::analyze(&i.op, tol, window)?;
            let undecided = r.an_verdict == "undecided" || r.norm.attained == "undecided";
            (to_value(echo("analyze", &[path_str(file)]), vec![i.digest], cli, r), undecided)
        }
        Command::AnCheck { file } => {
            let i = load(file)?;
            let r = commands::an(&i.op, tol, window)?;
            let undecided = r.undecided();
            (to_value(echo("an-check", &[path_str(file)]), vec![i.digest], cli, r), undecided)
        }
        Command::Commutator { single, pair, sandwich } => {
            let (flag, files) = match (single, pair, sandwich) {
                (Some(f), _, _) => ("--single", vec![f.clone()]),
                (_, Some(p), _) => ("--pair", p.clone()),
                (_, _, Some(p)) => ("--sandwich", p.clone()),
                _ => unreachable!("clap enforces one mode"),
            };
            let inputs = files.iter().map(|f| load(f)).collect::<Result<Vec<_>, _>>()?;
            let mode = match flag {
                "--single" => CommutatorMode::Single(&inputs[0].op),
                "--pair" => CommutatorMode::Pair(&inputs[0].op, &inputs[1].op),
                _ => CommutatorMode::Sandwich(&inputs[0].op, &inputs[1].op),
            };
            let r = commands::commutator(mode, tol)?;
            let mut args = vec![flag.to_string()];
            args.extend(files.iter().map(|f| path_str(f)));
            (to_value(echo("commutator", &args), inputs.into_iter().map(|i| i.digest).collect(), cli, r), false)
        }
        Command::Attainify { file, alpha, beta } => {
            let i = load(file)?;
            let r = commands::attainify_cmd(&i.op, *alpha, *beta, tol)?;
            let mut args = vec![path_str(file), "--alpha".into(), alpha.to_string()];
            if let Some(b) = beta {
                args.extend(["--beta".into(), format!("{},{}", b.re, b.im)]);
            }
            (to_value(echo("attainify", &args), vec![i.digest], cli, r), false)
        }
        Command::OracleCompare { file, dim } => {
            let i = load(file)?;
            let r = commands::oracle_compare(&i.op, *dim, tol, window, cli.seed)?;
            if !r.consistent {
                return Err(CliError {
                    kind: "numerical".into(),
                    message: format!("engine and dense oracle disagree: {}", serde_json::to_string(&r).unwrap_or_default()),
                    exit_code: EXIT_NUMERICAL,
                });
            }
            let args = vec![path_str(file), "--dim".into(), dim.to_string()];
            (to_value(echo("oracle-compare", &args), vec![i.digest], cli, r), false)
        }
        Command::Suite { dir } => return suite::run_suite(dir, cli),
    };
    Ok(Outcome { report, undecided, failure: None })
}

/// Serialized report followed by a newline.
pub fn render(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values are serializable");
    s.push('\n');
    s
}

/// Writes via a temporary sibling and a rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

/// Parses `args`, runs, and returns `(exit code, stdout text)`.
pub fn execute<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            return (code, e.to_string());
        }
    };
    let (code, value) = match run(&cli) {
        Ok(o) => {
            let code = match o.failure {
                Some(c) => c,
                None if cli.strict && o.undecided => EXIT_UNDECIDED,
                None => EXIT_OK,
            };
            (code, o.report)
        }
        Err(e) => (e.exit_code, serde_json::json!({ "error": e })),
    };
    let text = render(&value);
    if let Some(out) = &cli.json {
        if let Err(e) = write_atomic(out, &text) {
            let err = CliError { kind: "io".into(), message: format!("{}: {e}", out.display()), exit_code: EXIT_PRECONDITION };
            return (EXIT_PRECONDITION, render(&serde_json::json!({ "error": err })));
        }
    }
    (code, text)
}
