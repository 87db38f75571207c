//! Run artifacts: the exchange CSV, parameter snapshots, and run metadata.
//!
//! CSV columns, in order:
//!
//! | column         | meaning                                                    |
//! |----------------|------------------------------------------------------------|
//! | `step`         | time step, from 0                                          |
//! | `exchange`     | exchange index within the step                             |
//! | `listener_id`  | `A` or `B`; the listener acts                              |
//! | `speaker_id`   | `A` or `B`                                                 |
//! | `w_sp`         | symbol proposed by the speaker                             |
//! | `w_li`         | listener's own symbol                                      |
//! | `w_used`       | symbol the listener acted on                               |
//! | `accepted`     | 1 if the proposal was accepted                             |
//! | `r`            | acceptance ratio                                           |
//! | `action`       | action index (0 Cool, 1 Warm, 2 Eat, 3 Play, 4 Sleep)      |
//! | `energy_A` ... | body states of both agents after the exchange              |
//! | `jsd_C`        | Jensen-Shannon divergence between the two preferences      |
//! | `acc_rate_200` | acceptance rate over the trailing 200 exchanges            |
//! | `entA_A/B`     | mean likelihood column entropy of each agent (nats)        |
//! | `phase`        | `C` (preference learning) or `E` (interpretation learning) |
//! | `gate_sp`      | 1 if the speaker's preference gate was open                |
//!
//! Floats use Rust's shortest round-trip formatting, so equal runs produce
//! equal bytes.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiment::sim::{AgentId, Simulation, StepLog};

pub const CSV_FILE: &str = "exchanges.csv";
pub const METADATA_FILE: &str = "metadata.json";
pub const SNAPSHOT_DIR: &str = "snapshots";

pub const CSV_COLUMNS: [&str; 20] = [
    "step",
    "exchange",
    "listener_id",
    "speaker_id",
    "w_sp",
    "w_li",
    "w_used",
    "accepted",
    "r",
    "action",
    "energy_A",
    "temp_A",
    "energy_B",
    "temp_B",
    "jsd_C",
    "acc_rate_200",
    "entA_A",
    "entA_B",
    "phase",
    "gate_sp",
];

pub fn csv_header() -> String {
    CSV_COLUMNS.join(",")
}

pub fn csv_row(log: &StepLog) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        log.step,
        log.exchange,
        log.listener.label(),
        log.speaker.label(),
        log.outcome.speaker_symbol,
        log.outcome.listener_symbol,
        log.outcome.used_symbol,
        u8::from(log.outcome.accepted),
        log.outcome.acceptance_ratio,
        log.action.index(),
        log.body_a.energy(),
        log.body_a.temperature(),
        log.body_b.energy(),
        log.body_b.temperature(),
        log.jsd_c,
        log.acceptance_rate,
        log.entropy_a,
        log.entropy_b,
        log.phase.label(),
        u8::from(log.gate_speaker),
    )
}

/// One agent's learned parameters at a snapshot.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgentParameters {
    /// Likelihood, row-major `num_obs × num_states`.
    #[serde(rename = "A")]
    pub likelihood: Vec<f64>,
    #[serde(rename = "C")]
    pub preference: Vec<f64>,
    #[serde(rename = "C_scores")]
    pub preference_scores: Vec<f64>,
    pub phi: Vec<f64>,
}

/// Parameters of both agents and the shared interpretation after `step`
/// completed steps.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub step: u64,
    pub agents: [AgentParameters; 2],
    /// Shared interpretation, row-major `num_actions × num_symbols`.
    pub interpretation: Vec<f64>,
    pub interpretation_shape: [usize; 2],
    pub likelihood_shape: [usize; 2],
}

impl Snapshot {
    pub fn capture(sim: &Simulation) -> Self {
        let params = |id: AgentId| {
            let agent = sim.agent(id);
            AgentParameters {
                likelihood: agent.likelihood().row_major().to_vec(),
                preference: agent.preference().probs().to_vec(),
                preference_scores: agent.preference_scores().to_vec(),
                phi: agent.posterior().probs().to_vec(),
            }
        };
        let e = sim.interpretation().matrix();
        let a = sim.agent(AgentId::A).likelihood();
        Snapshot {
            step: sim.step_index(),
            agents: [params(AgentId::A), params(AgentId::B)],
            interpretation: e.row_major().to_vec(),
            interpretation_shape: [e.rows(), e.cols()],
            likelihood_shape: [a.rows(), a.cols()],
        }
    }

    pub fn agent(&self, id: AgentId) -> &AgentParameters {
        &self.agents[id.index()]
    }

    pub fn file_name(step: u64, id: AgentId) -> String {
        format!("step_{step:06}_agent_{}.json", id.label())
    }

    /// JSON document for one agent:
    /// `{step, agent_id, agent: {A, C, C_scores, phi}, E, A_shape, E_shape}`.
    pub fn to_json(&self, id: AgentId) -> serde_json::Value {
        #[derive(Serialize)]
        struct Doc<'a> {
            step: u64,
            agent_id: &'static str,
            agent: &'a AgentParameters,
            #[serde(rename = "E")]
            interpretation: &'a [f64],
            #[serde(rename = "A_shape")]
            likelihood_shape: [usize; 2],
            #[serde(rename = "E_shape")]
            interpretation_shape: [usize; 2],
        }
        serde_json::to_value(Doc {
            step: self.step,
            agent_id: id.label(),
            agent: self.agent(id),
            interpretation: &self.interpretation,
            likelihood_shape: self.likelihood_shape,
            interpretation_shape: self.interpretation_shape,
        })
        .expect("snapshot serializes")
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        for id in [AgentId::A, AgentId::B] {
            let path = dir.join(Self::file_name(self.step, id));
            let text = serde_json::to_string(&self.to_json(id))?;
            fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

/// Streams CSV rows to disk while a run progresses.
pub struct RunWriter {
    dir: PathBuf,
    csv: BufWriter<File>,
    csv_path: PathBuf,
}

impl RunWriter {
    pub fn create(dir: &Path) -> Result<Self> {
        let snapshots = dir.join(SNAPSHOT_DIR);
        fs::create_dir_all(&snapshots).map_err(|e| Error::io(&snapshots, e))?;
        let csv_path = dir.join(CSV_FILE);
        let file = File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
        let mut writer = RunWriter {
            dir: dir.to_path_buf(),
            csv: BufWriter::new(file),
            csv_path,
        };
        writer.line(&csv_header())?;
        Ok(writer)
    }

    fn line(&mut self, text: &str) -> Result<()> {
        writeln!(self.csv, "{text}").map_err(|e| Error::io(&self.csv_path, e))
    }

    pub fn log(&mut self, log: &StepLog) -> Result<()> {
        self.line(&csv_row(log))
    }

    pub fn metadata(&self, value: &serde_json::Value) -> Result<()> {
        let path = self.dir.join(METADATA_FILE);
        let text = serde_json::to_string_pretty(value)?;
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }

    pub fn finish(mut self) -> Result<()> {
        self.csv.flush().map_err(|e| Error::io(&self.csv_path, e))
    }
}
