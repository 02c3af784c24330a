use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

mod commands;
mod config;
mod error;
mod output;
mod svg;

use commands::Command;
use config::RunConfig;
use error::CliError;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Enclosure,
    Essential,
    Eigs,
    TruncateStudy,
    OracleCheck,
    Asymptotics,
}

impl From<Mode> for Command {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Enclosure => Command::Enclosure,
            Mode::Essential => Command::Essential,
            Mode::Eigs => Command::Eigs,
            Mode::TruncateStudy => Command::TruncateStudy,
            Mode::OracleCheck => Command::OracleCheck,
            Mode::Asymptotics => Command::Asymptotics,
        }
    }
}

/// Spectral enclosures, essential spectra and certified eigenvalues of a
/// lossy Drude-Lorentz waveguide.
#[derive(Debug, Parser)]
#[command(name = "drude-spectra", version)]
struct Args {
    mode: Mode,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides output.directory in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn run(args: Args) -> Result<(), CliError> {
    let cfg = RunConfig::load(&args.config)?;
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Compute(e.to_string()))?;
    }
    let dir = args.out.unwrap_or_else(|| cfg.output.directory.clone());
    let command = Command::from(args.mode);
    let outcome = commands::run(command, &cfg, &dir)?;
    for w in &outcome.warnings {
        log::warn!("{}: {}", w.kind, w.message);
    }
    for f in &outcome.files {
        log::info!("wrote {}", f.display());
    }
    match outcome.total_failure {
        Some(msg) => Err(CliError::Compute(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
