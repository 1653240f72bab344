//! `bandlab` — experiment harness for random band matrix studies.
//!
//! Every run is a pure function of the configuration file plus the
//! command-line overrides: seeds are derived per sample from
//! `run.baseSeed`, reductions happen in fixed order, and floats are
//! emitted at fixed width, so reruns are byte-identical regardless of
//! machine or thread count. Each output directory gains a
//! `manifest.json` tying the files to the configuration hash and seed
//! list.
//!
//! Exit codes: 0 on success, 2 for configuration errors (the message
//! names the offending field path), 1 for everything else.

mod commands;
mod config;
mod manifest;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use crate::commands::RunContext;
use crate::config::{ConfigError, Override};

#[derive(Parser)]
#[command(
    name = "bandlab",
    version,
    about = "Random band matrix experiment harness",
    propagate_version = true
)]
struct Cli {
    /// Path to the JSON experiment configuration.
    #[arg(long, value_name = "PATH", global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides outputs.directory).
    #[arg(long, value_name = "DIR", global = true)]
    out: Option<PathBuf>,

    /// Base seed (overrides run.baseSeed).
    #[arg(long, value_name = "U64", global = true)]
    seed: Option<u64>,

    /// Worker thread count (overrides run.threads); never changes results.
    #[arg(long, value_name = "N", global = true)]
    threads: Option<usize>,

    /// Dotted-path configuration override, e.g. --override run.samples=32.
    /// May be given multiple times; later overrides win.
    #[arg(long = "override", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Deterministic diffusion-profile tables (exact kernel, closed
    /// forms, envelope).
    Profile,
    /// Resolvent fluctuation Λ against the control parameter Φ², with
    /// exceedance tables.
    Locallaw,
    /// Smoothed square observable T against the diffusion kernel Θ.
    Diffusion,
    /// Fourier-mode decomposition of the self-consistent-equation error
    /// plus chain/loop observables.
    Errorlab,
    /// Eigenvalue census with eigenvector localization metrics.
    Spectrum,
    /// Exact vs sampled joint cumulants of the entry distribution.
    Cumulants,
    /// Scaling-exponent fits of medians across the spectral grid.
    Sweep,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Profile => "profile",
            Command::Locallaw => "locallaw",
            Command::Diffusion => "diffusion",
            Command::Errorlab => "errorlab",
            Command::Spectrum => "spectrum",
            Command::Cumulants => "cumulants",
            Command::Sweep => "sweep",
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match real_main(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn real_main(cli: &Cli) -> Result<()> {
    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| ConfigError::new("config", "--config PATH is required"))?;

    let mut overrides = Vec::new();
    for raw in &cli.overrides {
        overrides.push(Override::parse(raw)?);
    }
    if let Some(seed) = cli.seed {
        overrides.push(Override::typed("run.baseSeed", serde_json::json!(seed)));
    }
    if let Some(threads) = cli.threads {
        overrides.push(Override::typed("run.threads", serde_json::json!(threads)));
    }
    if let Some(out) = &cli.out {
        overrides.push(Override::typed(
            "outputs.directory",
            serde_json::Value::String(out.display().to_string()),
        ));
    }

    let config = config::load(config_path, &overrides)?;
    let out_dir = PathBuf::from(&config.outputs.directory);
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
    let ctx = RunContext {
        hash: manifest::config_hash(&config),
        config,
        out_dir,
    };

    log::info!(
        "{} → {} (hash {}, {} samples, {} threads)",
        cli.command.name(),
        ctx.out_dir.display(),
        &ctx.hash[..12],
        ctx.config.run.samples,
        ctx.config.run.threads
    );

    match cli.command {
        Command::Profile => commands::profile::run(&ctx),
        Command::Locallaw => commands::locallaw::run(&ctx),
        Command::Diffusion => commands::diffusion::run(&ctx),
        Command::Errorlab => commands::errorlab::run(&ctx),
        Command::Spectrum => commands::spectrum::run(&ctx),
        Command::Cumulants => commands::cumulants::run(&ctx),
        Command::Sweep => commands::sweep::run(&ctx),
    }
    .with_context(|| format!("{} run failed", cli.command.name()))
}
