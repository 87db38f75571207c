//! Running the two-agent simulation end to end.

mod config;
mod metrics;
mod output;
mod sim;

use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use config::{RoleScheme, RunConfig, OUT_DIR_ENV};
pub use metrics::{acceptance_rate, quartile_means, MetricsSeries};
pub use output::{
    csv_header, csv_row, AgentParameters, RunWriter, Snapshot, CSV_COLUMNS, CSV_FILE,
    METADATA_FILE, SNAPSHOT_DIR,
};
pub use sim::{AgentId, Simulation, StepLog, ACCEPTANCE_WINDOW};

use crate::error::Result;

/// Everything a run produced, kept in memory.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub config: RunConfig,
    /// Preference divergence before the first step.
    pub initial_jsd: f64,
    pub logs: Vec<StepLog>,
    /// Snapshots at step 0 and every `snapshot_interval` steps.
    pub snapshots: Vec<Snapshot>,
}

impl RunRecord {
    pub fn metrics(&self) -> MetricsSeries {
        MetricsSeries::from_logs(self.initial_jsd, &self.logs)
    }

    pub fn final_snapshot(&self) -> &Snapshot {
        self.snapshots.last().expect("the initial snapshot is always present")
    }
}

/// Drives a simulation for `config.total_steps`, handing every log and
/// snapshot to the callbacks as they are produced.
pub fn drive(
    config: &RunConfig,
    mut on_log: impl FnMut(&Simulation, &StepLog) -> Result<()>,
    mut on_snapshot: impl FnMut(Snapshot) -> Result<()>,
) -> Result<Simulation> {
    let mut sim = Simulation::new(config.clone())?;
    on_snapshot(Snapshot::capture(&sim))?;
    for _ in 0..config.total_steps {
        for log in sim.run_step()? {
            on_log(&sim, &log)?;
        }
        if sim.step_index() % config.snapshot_interval == 0 {
            on_snapshot(Snapshot::capture(&sim))?;
        }
    }
    Ok(sim)
}

/// Runs in memory without touching the filesystem.
pub fn simulate(config: &RunConfig) -> Result<RunRecord> {
    let initial_jsd = Simulation::new(config.clone())?.preference_divergence();
    let mut logs = Vec::with_capacity((config.total_steps * config.exchanges_per_step()) as usize);
    let mut snapshots = Vec::new();
    drive(
        config,
        |_, log| {
            logs.push(log.clone());
            Ok(())
        },
        |s| {
            snapshots.push(s);
            Ok(())
        },
    )?;
    Ok(RunRecord {
        config: config.clone(),
        initial_jsd,
        logs,
        snapshots,
    })
}

/// Config as echoed into run metadata: everything except the seed and the
/// output location.
pub fn config_echo(config: &RunConfig) -> serde_json::Value {
    let mut value = serde_json::to_value(config).expect("RunConfig serializes");
    if let Some(map) = value.as_object_mut() {
        map.remove("seed");
        map.remove("out_dir");
    }
    value
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub exchanges: u64,
    pub snapshots: usize,
    pub initial_jsd: f64,
    pub final_jsd: f64,
}

/// Runs and writes `exchanges.csv`, `snapshots/` and `metadata.json` into
/// `out_dir`.
pub fn run(config: &RunConfig, out_dir: &Path) -> Result<RunSummary> {
    config.validate()?;
    let mut writer = RunWriter::create(out_dir)?;
    let snapshot_dir = out_dir.join(SNAPSHOT_DIR);
    let mut exchanges = 0u64;
    let mut snapshots = Vec::new();
    let sim = drive(
        config,
        |_, log| {
            exchanges += 1;
            writer.log(log)
        },
        |s| {
            let step = s.step;
            s.write(&snapshot_dir)?;
            snapshots.push(step);
            Ok(())
        },
    )?;
    let initial_jsd = Simulation::new(config.clone())?.preference_divergence();
    let final_jsd = sim.preference_divergence();
    writer.metadata(&serde_json::json!({
        "seed": config.seed,
        "total_steps": config.total_steps,
        "exchanges": exchanges,
        "snapshot_steps": snapshots,
        "csv_columns": CSV_COLUMNS,
        "initial_jsd_C": initial_jsd,
        "final_jsd_C": final_jsd,
        "config": config_echo(config),
    }))?;
    writer.finish()?;
    Ok(RunSummary {
        out_dir: out_dir.to_path_buf(),
        exchanges,
        snapshots: snapshots.len(),
        initial_jsd,
        final_jsd,
    })
}

/// Directory used for one seed of a sweep.
pub fn seed_dir(root: &Path, seed: u64) -> PathBuf {
    root.join(format!("seed_{seed:04}"))
}

/// Independent runs for every seed, in parallel, each under its own
/// subdirectory of `root`. Results come back in seed order.
pub fn sweep(
    base: &RunConfig,
    seeds: impl IntoIterator<Item = u64>,
    root: &Path,
) -> Result<Vec<RunSummary>> {
    base.validate()?;
    let seeds: Vec<u64> = seeds.into_iter().collect();
    seeds
        .par_iter()
        .map(|&seed| {
            let config = RunConfig {
                seed,
                out_dir: seed_dir(root, seed),
                ..base.clone()
            };
            run(&config, &config.out_dir)
        })
        .collect()
}

/// In-memory runs for every seed, in parallel.
pub fn simulate_seeds(
    base: &RunConfig,
    seeds: impl IntoIterator<Item = u64>,
) -> Result<Vec<RunRecord>> {
    let seeds: Vec<u64> = seeds.into_iter().collect();
    seeds
        .par_iter()
        .map(|&seed| simulate(&RunConfig { seed, ..base.clone() }))
        .collect()
}
