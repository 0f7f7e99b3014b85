//! `pattern-spectra` command-line front end.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Format, RunConfig};
use error::CliError;

#[derive(Parser)]
#[command(name = "pattern-spectra", version, about = "Consecutive pattern avoidance: counts, spectra, closed forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact counts alpha_n for n = 0..=n_max.
    Count(Common),
    /// Leading eigenvalues of the discretized operator.
    Spectrum(Common),
    /// Closed-form eigenvalues and expansion terms for known cases.
    ClosedForm(Common),
    /// Graph verdict on the dominant eigenvalue, or the graph itself as DOT.
    Classify(Common),
    /// Spectral expansion against exact alpha_n/n!.
    Asymptotics(Common),
    /// All of the above in one JSON document.
    Report(Common),
}

#[derive(Args)]
struct Common {
    /// `{123,231}`, `{}:2`, `213`, `d:aab` or `d:{aa,bb}`.
    pattern: String,
    #[arg(long, default_value_t = 20)]
    n_max: usize,
    /// Grid points per axis; a power of two in 4..=4096.
    #[arg(long, default_value_t = 128)]
    grid: usize,
    /// Eigenvalues to report, or closed-form ladder size.
    #[arg(long, default_value_t = 3)]
    top: usize,
    #[arg(long, default_value_t = 30)]
    krylov: usize,
    /// Largest accepted eigenpair residual.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Common {
    fn config(&self, default_format: Format) -> Result<RunConfig, CliError> {
        RunConfig::new(
            &self.pattern,
            self.n_max,
            self.grid,
            self.top,
            self.krylov,
            self.tol,
            self.seed,
            self.format.unwrap_or(default_format),
            self.out.clone(),
        )
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("PATTERN_SPECTRA_THREADS") else {
        return Ok(());
    };
    let n: usize =
        raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::Usage(format!("PATTERN_SPECTRA_THREADS must be a positive integer, got {raw:?}"))
        })?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    let (cfg, output) = match &cli.command {
        Command::Count(c) => {
            let cfg = c.config(Format::Csv)?;
            let out = commands::count(&cfg)?;
            (cfg, out)
        }
        Command::Spectrum(c) => {
            let cfg = c.config(Format::Json)?;
            let out = commands::spectrum(&cfg)?;
            (cfg, out)
        }
        Command::ClosedForm(c) => {
            let cfg = c.config(Format::Json)?;
            let out = commands::closed_form(&cfg)?;
            (cfg, out)
        }
        Command::Classify(c) => {
            let cfg = c.config(Format::Json)?;
            let out = commands::classify_cmd(&cfg)?;
            (cfg, out)
        }
        Command::Asymptotics(c) => {
            let cfg = c.config(Format::Csv)?;
            let out = commands::asymptotics(&cfg)?;
            (cfg, out)
        }
        Command::Report(c) => {
            let cfg = c.config(Format::Json)?;
            let out = commands::report(&cfg)?;
            (cfg, out)
        }
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, output)?,
        None => print!("{output}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    // clap exits with 2 on bad flags by itself.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
