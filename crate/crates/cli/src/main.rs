use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use log::info;
use timebin_core::experiment::{run, ExperimentConfig};

/// Simulate and characterize a time-bin qubit fiber link.
#[derive(Parser)]
#[command(name = "timebin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Override the config's root seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Parse and validate a config file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load(path: &Path) -> Result<ExperimentConfig> {
    ExperimentConfig::load(path).with_context(|| format!("invalid config {}", path.display()))
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Validate { config } => {
            let cfg = load(&config)?;
            println!("{}: ok (scenario {}, hash {})", config.display(), cfg.scenario, cfg.hash()?);
        }
        Command::Run { config, out_dir, seed } => {
            let mut cfg = load(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            info!("writing into {}", out_dir.display());
            let (report, files) = run(&cfg, &out_dir).context("run failed")?;
            println!("scenario {} seed {} config {}", report.scenario, report.seed, report.config_hash);
            for (k, v) in &report.headline {
                println!("  {k} = {v:.6}");
            }
            for f in files {
                println!("wrote {}", f.display());
            }
        }
    }
    Ok(())
}
