use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::body::{NUM_ACTIONS, NUM_BODY_STATES};
use crate::error::{Error, Result};
use crate::learning::{LearningConfig, Phase};
use crate::model::PreferenceTemplate;

/// Environment variable that overrides the output directory.
pub const OUT_DIR_ENV: &str = "MHNG_OUT_DIR";

/// How listener and speaker roles are assigned over time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoleScheme {
    /// Two exchanges per step: A listens first, then B. Both bodies move once
    /// per step.
    DoubleExchange,
    /// One exchange per step; A listens on even steps, B on odd steps.
    AlternateSteps,
}

/// Everything needed to reproduce a run. Serialized as a flat TOML table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub total_steps: u64,

    pub num_obs: usize,
    pub num_states: usize,
    pub num_actions: usize,
    pub num_symbols: usize,

    pub eta_c: f64,
    pub eta_e: f64,
    pub tau_e: f64,
    pub entropy_threshold: f64,
    pub phase_length: u64,
    pub first_phase: Phase,

    /// Dirichlet pseudo-count placed in every likelihood cell at start.
    pub count_prior: f64,

    pub energy_target: f64,
    pub energy_sharpness: f64,
    pub temperature_sharpness: f64,
    pub temperature_target_a: f64,
    pub temperature_target_b: f64,

    pub role_scheme: RoleScheme,
    /// Steps between parameter snapshots.
    pub snapshot_interval: u64,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let learning = LearningConfig::default();
        RunConfig {
            seed: 0,
            total_steps: 10_000,
            num_obs: NUM_BODY_STATES,
            num_states: NUM_BODY_STATES,
            num_actions: NUM_ACTIONS,
            num_symbols: 15,
            eta_c: learning.eta_c,
            eta_e: learning.eta_e,
            tau_e: learning.tau_e,
            entropy_threshold: learning.entropy_threshold,
            phase_length: learning.phase_length,
            first_phase: learning.first_phase,
            count_prior: 0.1,
            energy_target: 2.5,
            energy_sharpness: 1.0,
            temperature_sharpness: 1.0,
            temperature_target_a: 5.0,
            temperature_target_b: 0.0,
            role_scheme: RoleScheme::DoubleExchange,
            snapshot_interval: 500,
            out_dir: PathBuf::from("runs/default"),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|source| Error::ConfigParse {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("RunConfig always serializes")
    }

    pub fn learning(&self) -> LearningConfig {
        LearningConfig {
            eta_c: self.eta_c,
            eta_e: self.eta_e,
            tau_e: self.tau_e,
            entropy_threshold: self.entropy_threshold,
            phase_length: self.phase_length,
            first_phase: self.first_phase,
        }
    }

    pub fn preference_template_a(&self) -> PreferenceTemplate {
        self.template(self.temperature_target_a)
    }

    pub fn preference_template_b(&self) -> PreferenceTemplate {
        self.template(self.temperature_target_b)
    }

    fn template(&self, temperature_target: f64) -> PreferenceTemplate {
        PreferenceTemplate {
            energy_target: self.energy_target,
            temperature_target,
            energy_sharpness: self.energy_sharpness,
            temperature_sharpness: self.temperature_sharpness,
        }
    }

    /// Exchanges logged per step under the configured role scheme.
    pub fn exchanges_per_step(&self) -> u64 {
        match self.role_scheme {
            RoleScheme::DoubleExchange => 2,
            RoleScheme::AlternateSteps => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fixed = [
            ("num_obs", self.num_obs, NUM_BODY_STATES),
            ("num_states", self.num_states, NUM_BODY_STATES),
            ("num_actions", self.num_actions, NUM_ACTIONS),
        ];
        for (name, got, want) in fixed {
            if got != want {
                return Err(Error::Config(format!(
                    "{name} = {got} does not match the body environment ({want})"
                )));
            }
        }
        if self.num_symbols == 0 {
            return Err(Error::Config("num_symbols must be positive".into()));
        }
        self.learning().validate()?;
        if !(self.count_prior.is_finite() && self.count_prior > 0.0) {
            return Err(Error::Config("count_prior must be positive".into()));
        }
        let finite = [
            self.energy_target,
            self.energy_sharpness,
            self.temperature_sharpness,
            self.temperature_target_a,
            self.temperature_target_b,
        ];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("preference template values must be finite".into()));
        }
        if self.snapshot_interval == 0 {
            return Err(Error::Config("snapshot_interval must be positive".into()));
        }
        if self.total_steps % self.snapshot_interval != 0 {
            return Err(Error::Config(format!(
                "snapshot_interval {} does not divide total_steps {}",
                self.snapshot_interval, self.total_steps
            )));
        }
        Ok(())
    }
}
