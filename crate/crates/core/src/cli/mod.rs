//! Command-line front end: configuration, subcommand dispatch and reports.
//!
//! Every run reads one TOML configuration. Reports are JSON with fields in
//! declaration order (CSV for `char-speeds`) and carry the SHA-256 of the
//! configuration file and the seed. Exit status: 0 success, 1 invalid
//! input, 2 numerical failure.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use config::{config_hash, AuditConfig, GridConfig, ModelConfig, OutputConfig, RunConfig, ScanConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) | CliError::Io(_) | CliError::Json(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bdnk", version, about = "Causality analysis and evolution for first-order viscous relativistic fluids")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, short, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for randomized audits; overrides `audit.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "BDNK_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Causality conditions and squared speeds over the configured energy range (JSON).
    CausalityCheck,
    /// Characteristic speeds over directions and energies (CSV).
    CharSpeeds,
    /// Randomized determinant and eigenstructure suites (JSON).
    SymbolAudit,
    /// Time evolution; writes snapshots, monitors.csv and summary.json.
    Evolve,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CausalityCheck => "causality-check",
            Command::CharSpeeds => "char-speeds",
            Command::SymbolAudit => "symbol-audit",
            Command::Evolve => "evolve",
        }
    }
}

/// Loaded configuration plus the provenance recorded in reports.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: RunConfig,
    pub config_hash: String,
    pub seed: u64,
    /// Directory against which relative paths in the configuration resolve.
    pub base: PathBuf,
}

impl Context {
    pub fn load(path: &Path, seed: Option<u64>) -> Result<Self, CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let text = std::str::from_utf8(&bytes)
            .map_err(|e| CliError::Config(format!("{} is not UTF-8: {e}", path.display())))?;
        let config = RunConfig::parse(text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let seed = seed.unwrap_or(config.audit.seed);
        Ok(Self {
            seed,
            config_hash: config_hash(&bytes),
            base: path.parent().map(Path::to_path_buf).unwrap_or_default(),
            config,
        })
    }
}

/// Runs one subcommand, writing the report to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    if cli.threads == Some(0) {
        return Err(CliError::Config("--threads must be at least 1".into()));
    }
    let ctx = Context::load(path, cli.seed)?;
    let mut buf = Vec::new();
    let result = crate::par::with_threads(cli.threads, || commands::dispatch(cli.command, &ctx, &mut buf));
    out.write_all(&buf)?;
    result
}

/// Parses `args` and runs; returns the process exit status.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let stdout = std::io::stdout();
    match run(&cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bdnk {}: {e}", cli.command.name());
            ExitCode::from(e.exit_code())
        }
    }
}
