mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use yb_readout::transit::{Format, IoError};
use yb_readout::ConfigError;

use crate::commands::RunContext;
use crate::config::RunConfig;

/// Polarization-resolved spin readout simulator for ¹⁷¹Yb in a two-mode cavity.
#[derive(Parser, Debug)]
#[command(name = "ybreadout", version)]
struct Cli {
    /// TOML run configuration; defaults are used for anything omitted.
    #[arg(long, global = true, env = "YB_READOUT_CONFIG")]
    config: Option<PathBuf>,
    /// Master seed for stochastic commands (overrides the config file).
    #[arg(long, global = true, env = "YB_READOUT_SEED")]
    seed: Option<u64>,
    /// Output directory (overrides the config file; default ".").
    #[arg(long, global = true, env = "YB_READOUT_OUT")]
    out: Option<PathBuf>,
    /// Table format, csv or jsonl (overrides the config file).
    #[arg(long, global = true, env = "YB_READOUT_FORMAT")]
    format: Option<Format>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, env = "YB_READOUT_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fluorescence spectra with and without the light-shift beam.
    Spectrum,
    /// Predicted SNR against light-shift power and waist.
    Snr,
    /// σ⁺/σ⁻ count pairs per measurement window, light shift off and on.
    Scatter,
    /// Projective-measurement windows for each initial spin.
    Transit,
    /// MOT population against probe detuning.
    Motdip,
    /// Print the default configuration as TOML.
    PrintDefaults,
}

const EXIT_IO: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn run(cli: Cli) -> Result<()> {
    if let Command::PrintDefaults = cli.command {
        return commands::print_defaults();
    }
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(ConfigError::Invalid("--threads must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let ctx = RunContext {
        out_dir: cli.out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from(".")),
        format: cli.format.or(cfg.format).unwrap_or(Format::Csv),
        seed: cli.seed.or(cfg.seed),
        cfg,
    };
    match cli.command {
        Command::Spectrum => commands::spectrum(&ctx),
        Command::Snr => commands::snr(&ctx),
        Command::Scatter => commands::scatter(&ctx),
        Command::Transit => commands::transit(&ctx),
        Command::Motdip => commands::motdip(&ctx),
        Command::PrintDefaults => unreachable!(),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<ConfigError>() || cause.is::<toml::de::Error>() {
            return EXIT_CONFIG;
        }
        if cause.is::<yb_readout::dynamics::DynamicsError>()
            || cause.is::<yb_readout::lightshift::LightShiftError>()
        {
            return EXIT_NUMERICAL;
        }
        if cause.is::<std::io::Error>() || cause.is::<IoError>() {
            return EXIT_IO;
        }
    }
    EXIT_IO
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
