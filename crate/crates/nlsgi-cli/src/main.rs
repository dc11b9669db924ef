//! `nlsgi` — command-line harness for the NLS-GI inverse-scattering engine.
//!
//! Exit codes: 0 success, 1 usage/config/I-O, 2 soliton gate, 3 numerical
//! failure.

mod commands;
mod config;
mod suites;

use clap::{Parser, Subcommand};
use config::RunConfig;
use nlsgi_core::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "nlsgi", version, about = "Inverse scattering transform for the combined NLS-GI equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (`key = value` lines, `#` comments). Defaults are
    /// used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = "nlsgi-out")]
    out: PathBuf,

    /// Echo the normalized configuration and exit.
    #[arg(long, global = true)]
    dry_run: bool,

    /// Worker threads for the parallel sweeps (0 = library default).
    /// The NLSGI_THREADS environment variable is the fallback.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Direct scattering of the configured potential into an archive.
    Scatter,
    /// Riemann–Hilbert inversion of a scattering archive.
    Invert,
    /// IST time evolution cross-checked against the direct solver.
    Evolve,
    /// Direct pseudo-spectral reference solve only.
    Reference,
    /// Run the verification suite selected by the config.
    Verify,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::SolitonGate { .. } => 2,
        Error::Grid(_)
        | Error::Preset(_)
        | Error::Malformed { .. }
        | Error::Io(_)
        | Error::Json(_)
        | Error::Config(_) => 1,
        Error::DataCorruption(_)
        | Error::VolterraStep { .. }
        | Error::NonConvergence { .. }
        | Error::Instability { .. }
        | Error::UnstableStep { .. } => 3,
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    let cfg: RunConfig = match &cli.config {
        Some(path) => config::parse_config(path)?,
        None => RunConfig::default(),
    };
    if cli.dry_run {
        print!("{}", cfg.normalized());
        return Ok(());
    }

    let threads = if cli.threads > 0 {
        cli.threads
    } else {
        std::env::var("NLSGI_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .unwrap_or(0)
    };
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }

    std::fs::create_dir_all(&cli.out)?;
    match cli.command {
        Command::Scatter => commands::cmd_scatter(&cfg, &cli.out),
        Command::Invert => commands::cmd_invert(&cfg, &cli.out),
        Command::Evolve => commands::cmd_evolve(&cfg, &cli.out),
        Command::Reference => commands::cmd_reference(&cfg, &cli.out),
        Command::Verify => {
            let report = suites::cmd_verify(&cfg, &cli.out)?;
            if !report.overall_pass {
                return Err(Error::NonConvergence {
                    context: format!("suite `{}` failed", cfg.suite),
                    iterations: 0,
                    contraction: f64::NAN,
                });
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
