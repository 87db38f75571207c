use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mhng_core::experiment::{self, RunConfig, OUT_DIR_ENV};
use mhng_core::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "mhng", version, about = "Two-agent naming game simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one simulation and write its CSV log and snapshots.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the config file.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; takes precedence over MHNG_OUT_DIR and the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run independent seeds in parallel, one subdirectory per seed.
    Sweep {
        /// Inclusive seed range, e.g. `0..9`.
        #[arg(long, value_parser = parse_seed_range)]
        seeds: (u64, u64),
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and check a config file without running it.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the default configuration as TOML.
    DumpDefaults,
}

fn parse_seed_range(s: &str) -> std::result::Result<(u64, u64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected a range like 0..9, got `{s}`"))?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let lo: u64 = lo.trim().parse().map_err(|e| format!("bad start `{lo}`: {e}"))?;
    let hi: u64 = hi.trim().parse().map_err(|e| format!("bad end `{hi}`: {e}"))?;
    if hi < lo {
        return Err(format!("empty seed range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

fn output_dir(flag: Option<PathBuf>, config: &RunConfig) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| config.out_dir.clone())
}

fn load(path: &PathBuf) -> Result<RunConfig> {
    let config = RunConfig::load(path)?;
    config.validate()?;
    Ok(config)
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run { config, seed, out } => {
            let mut config = load(&config)?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            let dir = output_dir(out, &config);
            config.out_dir = dir.clone();
            let summary = experiment::run(&config, &dir)?;
            println!(
                "wrote {} exchanges and {} snapshots to {} (jsd_C {:.4} -> {:.4})",
                summary.exchanges,
                summary.snapshots,
                dir.display(),
                summary.initial_jsd,
                summary.final_jsd
            );
        }
        Command::Sweep { seeds, config, out } => {
            let base = match config {
                Some(path) => load(&path)?,
                None => RunConfig::default(),
            };
            let root = output_dir(out, &base);
            let summaries = experiment::sweep(&base, seeds.0..=seeds.1, &root)?;
            for s in &summaries {
                println!(
                    "{}: jsd_C {:.4} -> {:.4}",
                    s.out_dir.display(),
                    s.initial_jsd,
                    s.final_jsd
                );
            }
        }
        Command::ValidateConfig { config } => {
            load(&config)?;
            println!("{}: ok", config.display());
        }
        Command::DumpDefaults => print!("{}", RunConfig::default().to_toml_string()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            match err {
                Error::Config(_) | Error::ConfigParse { .. } => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
