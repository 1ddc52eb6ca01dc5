//! Batch front end: reads a fluid configuration, runs one command and writes
//! CSV or JSON.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rtgrowth::model::config_from_json;
use rtgrowth::{Error, FluidConfig};

pub mod commands;
pub mod verify;

#[derive(Debug, Parser)]
#[command(name = "rtgrowth", version, about = "Largest Rayleigh-Taylor growth rate of two viscous layers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Fluid configuration (JSON object).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Finite elements per layer.
    #[arg(long, global = true, default_value_t = 128, value_parser = clap::value_parser!(u64).range(8..))]
    pub resolution: u64,

    /// Fixed-point tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,

    /// Surface tension as fractions of the critical value.
    #[arg(long, global = true, value_delimiter = ',', default_value = "0,0.25,0.5,0.75,0.9,0.99")]
    pub theta_grid: Vec<f64>,

    /// Damping parameters for `alpha-curve`.
    #[arg(long, global = true, value_delimiter = ',', default_value = "0.5,1,1.5,2,2.5,3,3.5,4,4.5,5")]
    pub s_grid: Vec<f64>,

    /// Wave numbers for `dispersion-curve` and `oracle-compare`; lattice
    /// magnitudes up to five times the smallest when absent.
    #[arg(long, global = true, value_delimiter = ',')]
    pub k_grid: Option<Vec<f64>>,

    /// Fix the wave-number cutoff instead of growing it until certified.
    #[arg(long, global = true)]
    pub kmax: Option<f64>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Growth rate and maximizing mode at the configured surface tension.
    Growth,
    /// Global alpha(s) over the s grid.
    AlphaCurve,
    /// Per-mode growth rates from the variational solver and the dispersion relation.
    DispersionCurve,
    /// Growth rate over the theta grid, with a JSON report of the checks.
    SweepTheta,
    /// Runs the invariant suite and exits nonzero on any failure.
    Verify,
    /// Oracle agreement table including extrapolated variational rates.
    OracleCompare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Command {
    fn default_format(self) -> Format {
        match self {
            Command::Growth | Command::Verify => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Config(String),
    Solver(Error),
    Io(String),
    /// The verification suite ran and at least one check failed.
    Checks(usize),
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage: {m}"),
            Failure::Config(m) => write!(f, "config: {m}"),
            Failure::Solver(e) => write!(f, "{e}"),
            Failure::Io(m) => write!(f, "io: {m}"),
            Failure::Checks(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Checks(_) => 1,
            Failure::Solver(e) if matches!(e.root(), Error::StableRegime { .. }) => 3,
            Failure::Solver(e) if e.is_numerical() => 4,
            _ => 2,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Solver(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

pub fn load_config(path: &Path) -> Result<FluidConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    config_from_json(&text).map_err(|e| Failure::Config(e.to_string()))
}

/// Output sink: a buffered file or standard output.
pub fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(Failure::Usage(format!("--tol must be positive, got {}", cli.tol)));
    }
    if let Some(k) = cli.kmax {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Failure::Usage(format!("--kmax must be positive, got {k}")));
        }
    }
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| Failure::Usage("--config is required".into()))?;
    let cfg = load_config(path)?;
    let pool = match cli.jobs {
        Some(0) => return Err(Failure::Usage("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n),
        None => rayon::ThreadPoolBuilder::new(),
    }
    .build()
    .map_err(|e| Failure::Usage(e.to_string()))?;
    let format = cli.format.unwrap_or(cli.command.default_format());
    pool.install(|| commands::dispatch(cli, &cfg, format))
}
