//! `ewvqe` command-line front end.
//!
//! Exit codes: 0 on success, 1 on runtime failure, 2 on usage or
//! configuration errors.

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use witness_vqe::ansatz::Family;
use witness_vqe::witness::EsepSource;

mod ground;
mod manifest;
pub mod plot;
pub mod svg;
mod sweep;
mod vqe;

pub use manifest::RunManifest;

/// Default output directory when `--out` is not given.
pub const OUT_DIR_ENV: &str = "EWVQE_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "ewvqe-out";

#[derive(Debug, Parser)]
#[command(name = "ewvqe", version, about = "VQE entanglement-witness benchmarks on Heisenberg chains")]
pub struct Cli {
    /// Worker threads for restart-level parallelism (0 = all cores, 1 = sequential).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact ground energy, separable bound and witness gap.
    Ground(GroundArgs),
    /// Two-stage witness protocol for one ansatz family.
    Vqe(VqeArgs),
    /// Run an experiment grid from a JSON config, resuming from checkpoints.
    Sweep(SweepArgs),
    /// Render a results file as SVG plus a CSV twin.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    /// Number of spins.
    #[arg(long)]
    pub n: Option<usize>,
    /// Coupling constant.
    #[arg(long = "J", default_value_t = -1.0, allow_hyphen_values = true)]
    pub coupling: f64,
    /// Longitudinal field.
    #[arg(long = "h", default_value_t = 0.0, allow_hyphen_values = true)]
    pub field: f64,
    /// Hamiltonian JSON file; overrides --n, --J and --h.
    #[arg(long)]
    pub hamiltonian: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GroundArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Seed for the separable-energy oracle starts.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EsepArg {
    Oracle,
    VqeHesa,
}

impl From<EsepArg> for EsepSource {
    fn from(a: EsepArg) -> Self {
        match a {
            EsepArg::Oracle => EsepSource::AnalyticOracle,
            EsepArg::VqeHesa => EsepSource::VqeHesa,
        }
    }
}

#[derive(Debug, Args)]
pub struct VqeArgs {
    #[arg(long, value_parser = parse_family)]
    pub family: Family,
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Shots per measurement setting; 0 evaluates energies exactly.
    #[arg(long, default_value_t = 0)]
    pub shots: u32,
    #[arg(long, default_value_t = 1)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub iterations: usize,
    #[arg(long, default_value_t = 0.1)]
    pub step_size: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub init_low: f64,
    #[arg(long, default_value_t = std::f64::consts::TAU, allow_hyphen_values = true)]
    pub init_high: f64,
    /// HESA restarts for the stage-1 separable estimate (0 skips stage 1).
    #[arg(long, default_value_t = 10)]
    pub stage1_restarts: usize,
    /// Which separable energy the witness threshold uses.
    #[arg(long, value_enum, default_value_t = EsepArg::Oracle)]
    pub esep_source: EsepArg,
    /// Output directory [default: $EWVQE_OUT_DIR or ./ewvqe-out, plus /vqe/<family>-n<n>-s<shots>]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON sweep configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides `master_seed` from the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory [default: $EWVQE_OUT_DIR or ./ewvqe-out]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Shots,
    Detection,
    Convergence,
    Normalized,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Results JSONL, or a CSV twin written by a previous plot.
    #[arg(long)]
    pub results: PathBuf,
    #[arg(long, value_enum)]
    pub figure: Figure,
    /// SVG path; the CSV twin is written next to it.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_parser = parse_family)]
    pub family: Option<Family>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub shots: Option<u32>,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: witness_vqe::Error| e.to_string())
}

/// Failure of a subcommand, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<witness_vqe::Error> for CliError {
    fn from(e: witness_vqe::Error) -> Self {
        match e {
            witness_vqe::Error::InvalidArgument(_) | witness_vqe::Error::Json { .. } => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

pub(crate) fn io_error(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

pub(crate) fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

pub(crate) fn load_chain(chain: &ChainArgs) -> Result<witness_vqe::Hamiltonian, CliError> {
    if let Some(path) = &chain.hamiltonian {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        return serde_path_to_error::deserialize(de)
            .map_err(|e| CliError::Usage(format!("{}: {} at {}", path.display(), e.inner(), e.path())));
    }
    let n = chain
        .n
        .ok_or_else(|| CliError::Usage("either --n or --hamiltonian is required".into()))?;
    Ok(witness_vqe::build_heisenberg(n, chain.coupling, chain.field)?)
}

/// Runs the CLI with explicit output sinks; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return e.exit_code();
        }
    };
    let jobs = witness_vqe::par::Jobs(cli.jobs.unwrap_or(0));
    let result = match &cli.command {
        Command::Ground(a) => ground::run(a, jobs, out),
        Command::Vqe(a) => vqe::run(a, jobs, out),
        Command::Sweep(a) => sweep::run(a, cli.jobs, out, err),
        Command::Plot(a) => plot::run(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
