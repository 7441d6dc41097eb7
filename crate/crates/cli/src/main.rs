//! `laguerre-edge`: command-line access to sampling, geometry, log-determinants,
//! batch simulation, lemma diagnostics and the acceptance suite.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use laguerre_edge::ensemble::{build_tridiagonal, sample_bidiagonal, EnsembleParams};
use laguerre_edge::error::EdgeError;
use laguerre_edge::geometry::{edge_params, EdgeGeometry};
use laguerre_edge::harness::{run_batch_with_progress, write_csv, write_jsonl, write_summary, SimulationConfig};
use laguerre_edge::logdet::{eigen_oracle, run_recursion};
use laguerre_edge::numfmt;
use laguerre_edge::theory::CltConstants;
use laguerre_edge_verify::{lemma_report, run_criterion, Tolerances, CRITERIA};

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_ACCEPTANCE: u8 = 3;

#[derive(Parser)]
#[command(name = "laguerre-edge", version, about = "Log-determinants of Laguerre beta-ensembles near the spectral edge")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the CLT constants as JSON.
    Constants(EdgeArgs),
    /// Dump the deterministic geometry as CSV.
    Geometry {
        #[command(flatten)]
        edge: EdgeArgs,
        /// Write to this file instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Draw one tridiagonal sample and print it as JSON.
    Sample {
        #[command(flatten)]
        edge: EdgeArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        replica: u64,
    },
    /// Log-determinant of one replica.
    Logdet {
        #[command(flatten)]
        edge: EdgeArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        replica: u64,
        /// Also compute the value from the eigenvalues (n <= 5000).
        #[arg(long)]
        oracle: bool,
    },
    /// Run a batch of replicas. JSONL goes to --output or standard output.
    Simulate(SimulateArgs),
    /// Compare lemma-level quantities with their predictions.
    Diagnose {
        #[command(flatten)]
        edge: EdgeArgs,
        #[arg(long, default_value_t = 200)]
        replicas: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// 0 means the environment default, then all CPUs.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long)]
        tolerance_manifest: Option<PathBuf>,
    },
    /// Run the acceptance suite.
    Verify {
        /// Alternate tolerance manifest (JSON).
        #[arg(long)]
        tolerance_manifest: Option<PathBuf>,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Args, Clone)]
struct EdgeArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Defaults to (ln n)^{3/2}.
    #[arg(long)]
    sigma: Option<f64>,
}

impl EdgeArgs {
    fn params(&self) -> anyhow::Result<EnsembleParams> {
        Ok(edge_params(self.n, self.lambda, self.alpha, self.sigma)?)
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON file with any of the fields below; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write the records as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the summary JSON here instead of standard error.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long)]
    quiet: bool,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    n: Option<usize>,
    lambda: Option<f64>,
    alpha: Option<f64>,
    sigma: Option<f64>,
    replicas: Option<usize>,
    seed: Option<u64>,
    workers: Option<usize>,
    oracle: Option<bool>,
    output: Option<PathBuf>,
}

#[derive(Serialize)]
struct LogdetOutput {
    #[serde(rename = "log_abs_calD", serialize_with = "numfmt::serialize")]
    log_abs_cal_d: f64,
    #[serde(rename = "log_abs_D", serialize_with = "numfmt::serialize")]
    log_abs_d: f64,
    sign: i8,
    #[serde(serialize_with = "numfmt::serialize")]
    max_abs_r: f64,
    guard_events: usize,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "numfmt::option::serialize")]
    oracle_value: Option<f64>,
}

#[derive(Serialize)]
struct SampleOutput {
    seed: u64,
    m: usize,
    #[serde(serialize_with = "numfmt::vec::serialize")]
    a_sq: Vec<f64>,
    #[serde(serialize_with = "numfmt::vec::serialize")]
    b_sq: Vec<f64>,
    #[serde(serialize_with = "numfmt::vec::serialize")]
    diag: Vec<f64>,
    #[serde(serialize_with = "numfmt::vec::serialize")]
    offdiag: Vec<f64>,
}

fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn open_output(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn simulate(args: SimulateArgs) -> anyhow::Result<()> {
    let file: FileConfig = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => FileConfig::default(),
    };
    let (Some(n), Some(lambda)) = (args.n.or(file.n), args.lambda.or(file.lambda)) else {
        bail!(UsageError("simulate needs --n and --lambda (flags or config file)".into()));
    };
    let alpha = args.alpha.or(file.alpha).unwrap_or(1.0);
    let params = edge_params(n, lambda, alpha, args.sigma.or(file.sigma))?;
    let mut config = SimulationConfig::new(params, args.replicas.or(file.replicas).unwrap_or(1000), args.seed.or(file.seed).unwrap_or(0));
    config.workers = args.workers.or(file.workers).unwrap_or(0);
    config.run_oracle = args.oracle || file.oracle.unwrap_or(false);
    let output = args.output.or(file.output);

    let total = config.replicas;
    let quiet = args.quiet;
    let batch = run_batch_with_progress(&config, |done| {
        if !quiet {
            eprint!("\rreplicas {done}/{total}");
            if done == total {
                eprintln!();
            }
        }
    })?;
    write_jsonl(&batch.records, open_output(&output)?)?;
    if let Some(p) = &args.csv {
        write_csv(&batch.records, BufWriter::new(File::create(p)?))?;
    }
    let summary = batch.summary()?;
    match &args.summary {
        Some(p) => write_summary(&summary, BufWriter::new(File::create(p)?))?,
        None if !quiet => write_summary(&summary, std::io::stderr().lock())?,
        None => {}
    }
    Ok(())
}

fn load_tolerances(path: &Option<PathBuf>) -> anyhow::Result<Tolerances> {
    Ok(match path {
        Some(p) => Tolerances::from_path(p).with_context(|| format!("loading {}", p.display()))?,
        None => Tolerances::embedded(),
    })
}

/// Returns whether every selected criterion passed.
fn verify(manifest: &Option<PathBuf>, only: &[u8]) -> anyhow::Result<bool> {
    let tol = load_tolerances(manifest)?;
    let ids: Vec<u8> = if only.is_empty() { CRITERIA.to_vec() } else { only.to_vec() };
    if let Some(bad) = ids.iter().find(|id| !CRITERIA.contains(id)) {
        bail!(UsageError(format!("no acceptance criterion {bad}; expected 1-{}", CRITERIA.len())));
    }
    let mut all = true;
    let mut out = std::io::stdout().lock();
    for id in ids {
        let report = run_criterion(id, &tol)?;
        all &= report.pass;
        writeln!(out, "{report}")?;
        out.flush()?;
    }
    Ok(all)
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Constants(edge) => print_json(&CltConstants::new(&edge.params()?)?)?,
        Command::Geometry { edge, output } => {
            let geom = EdgeGeometry::build(&edge.params()?)?;
            let mut w = open_output(&output)?;
            geom.write_csv(&mut w)?;
            w.flush()?;
        }
        Command::Sample { edge, seed, replica } => {
            let s = sample_bidiagonal(&edge.params()?, seed, replica)?;
            let (diag, offdiag) = build_tridiagonal(&s);
            print_json(&SampleOutput { seed: s.seed, m: s.m, a_sq: s.a_sq, b_sq: s.b_sq, diag, offdiag })?;
        }
        Command::Logdet { edge, seed, replica, oracle } => {
            let params = edge.params()?;
            let geom = EdgeGeometry::build(&params)?;
            let s = sample_bidiagonal(&params, seed, replica)?;
            let trace = run_recursion(&s, &geom)?;
            let oracle_value = if oracle {
                Some(eigen_oracle(&s, &params)? - params.n as f64 * (params.m as f64).ln())
            } else {
                None
            };
            print_json(&LogdetOutput {
                log_abs_cal_d: trace.log_abs_cal_d,
                log_abs_d: trace.log_abs_d,
                sign: trace.sign_e,
                max_abs_r: trace.max_abs_r,
                guard_events: trace.guard_events,
                oracle_value,
            })?;
        }
        Command::Simulate(args) => simulate(args)?,
        Command::Diagnose { edge, replicas, seed, workers, tolerance_manifest } => {
            let tol = load_tolerances(&tolerance_manifest)?;
            print_json(&lemma_report(&edge.params()?, replicas, seed, workers, &tol.lemmas)?)?;
        }
        Command::Verify { tolerance_manifest, only } => {
            if !verify(&tolerance_manifest, &only)? {
                return Ok(ExitCode::from(EXIT_ACCEPTANCE));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return EXIT_USAGE;
    }
    match err.downcast_ref::<EdgeError>() {
        Some(e) if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

// `laguerre-edge ... | head` closes stdout early; that is not an error.
fn is_broken_pipe(err: &anyhow::Error) -> bool {
    use std::io::ErrorKind::BrokenPipe;
    err.chain().any(|e| {
        e.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == BrokenPipe)
            || e.downcast_ref::<serde_json::Error>().and_then(|j| j.io_error_kind()) == Some(BrokenPipe)
            || match e.downcast_ref::<EdgeError>() {
                Some(EdgeError::Io(io)) => io.kind() == BrokenPipe,
                Some(EdgeError::Json(j)) => j.io_error_kind() == Some(BrokenPipe),
                _ => false,
            }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) if is_broken_pipe(&err) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
