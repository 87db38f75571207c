//! Online parameter updates and the schedule that alternates between them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::AgentModel;
use crate::policy::{EfeVector, SharedInterpretation};
use crate::prob::{softmax, Categorical, OneHot};

/// Which shared parameter is being learned during a block of steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// Prior preferences `C` are updated.
    Preference,
    /// The shared interpretation `E` is updated.
    Interpretation,
}

impl Phase {
    pub fn other(self) -> Phase {
        match self {
            Phase::Preference => Phase::Interpretation,
            Phase::Interpretation => Phase::Preference,
        }
    }

    /// Short label used in the CSV log.
    pub fn label(self) -> &'static str {
        match self {
            Phase::Preference => "C",
            Phase::Interpretation => "E",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearningConfig {
    /// Preference learning rate.
    pub eta_c: f64,
    /// Interpretation learning rate, in `[0, 1]`.
    pub eta_e: f64,
    /// Softmax temperature of the interpretation target.
    pub tau_e: f64,
    /// Preference updates only happen once the mean likelihood entropy (nats)
    /// drops below this.
    pub entropy_threshold: f64,
    /// Steps per phase.
    pub phase_length: u64,
    pub first_phase: Phase,
}

impl Default for LearningConfig {
    fn default() -> Self {
        LearningConfig {
            eta_c: 0.1,
            eta_e: 0.1,
            tau_e: 1.0,
            entropy_threshold: 1.0,
            phase_length: 100,
            first_phase: Phase::Interpretation,
        }
    }
}

impl LearningConfig {
    /// Rates may be zero (frozen controls); everything else must be positive.
    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |x: f64| x.is_finite() && x >= 0.0;
        if !finite_nonneg(self.eta_c) {
            return Err(Error::Config(format!("eta_c must be >= 0, got {}", self.eta_c)));
        }
        if !(finite_nonneg(self.eta_e) && self.eta_e <= 1.0) {
            return Err(Error::Config(format!(
                "eta_e must be in [0, 1], got {}",
                self.eta_e
            )));
        }
        if !(self.tau_e.is_finite() && self.tau_e > 0.0) {
            return Err(Error::Config(format!("tau_e must be > 0, got {}", self.tau_e)));
        }
        if !(self.entropy_threshold.is_finite() && self.entropy_threshold > 0.0) {
            return Err(Error::Config(format!(
                "entropy_threshold must be > 0, got {}",
                self.entropy_threshold
            )));
        }
        if self.phase_length == 0 {
            return Err(Error::Config("phase_length must be positive".into()));
        }
        Ok(())
    }
}

/// Phase active at step `t`: `first_phase` for even blocks of
/// `phase_length` steps, the other phase for odd blocks.
pub fn phase(t: u64, cfg: &LearningConfig) -> Phase {
    if (t / cfg.phase_length) % 2 == 0 {
        cfg.first_phase
    } else {
        cfg.first_phase.other()
    }
}

/// `a ← a + o ⊗ φ`, then the likelihood is re-derived from the counts.
pub fn update_likelihood_counts(model: &mut AgentModel, obs: &OneHot, phi: &Categorical) -> Result<()> {
    if obs.dim() != model.num_obs() {
        return Err(Error::DimensionMismatch {
            expected: model.num_obs(),
            actual: obs.dim(),
        });
    }
    if phi.len() != model.num_states() {
        return Err(Error::DimensionMismatch {
            expected: model.num_states(),
            actual: phi.len(),
        });
    }
    model.counts.add_to_row(obs.index(), phi.probs());
    model.likelihood = model.counts.expected_likelihood();
    Ok(())
}

/// True when the agent's likelihood is sharp enough for preference learning.
pub fn preference_gate_open(model: &AgentModel, cfg: &LearningConfig) -> bool {
    model.mean_likelihood_entropy() < cfg.entropy_threshold
}

/// Moves the preference scores of the agent whose proposal was rejected
/// toward the observations predicted under the symbol that was used, and away
/// from those predicted under its own proposal. Scores change by at most
/// `eta_c` per entry.
///
/// Returns whether the update was applied; it is skipped while the entropy
/// gate is closed.
pub fn update_preference(
    model: &mut AgentModel,
    interpretation: &SharedInterpretation,
    adopted_symbol: usize,
    rejected_symbol: usize,
    cfg: &LearningConfig,
) -> Result<bool> {
    if !preference_gate_open(model, cfg) {
        return Ok(false);
    }
    let predictions = model.predict_obs_all();
    let toward = crate::model::mix_predictions(&predictions, interpretation, adopted_symbol)?;
    let away = crate::model::mix_predictions(&predictions, interpretation, rejected_symbol)?;
    for ((score, t), a) in model
        .preference_scores
        .iter_mut()
        .zip(toward.probs())
        .zip(away.probs())
    {
        *score += cfg.eta_c * (t - a);
    }
    model.preference = softmax(&model.preference_scores, 1.0)?;
    Ok(true)
}

/// `E[:, w] ← (1 − η_E) E[:, w] + η_E softmax(−g / τ)`. Other columns are
/// untouched.
pub fn update_interpretation(
    interpretation: &mut SharedInterpretation,
    symbol: usize,
    g: &EfeVector,
    cfg: &LearningConfig,
) -> Result<()> {
    if g.len() != interpretation.num_actions() {
        return Err(Error::DimensionMismatch {
            expected: interpretation.num_actions(),
            actual: g.len(),
        });
    }
    let old = interpretation.action_distribution(symbol)?;
    let scaled: Vec<f64> = g.values().iter().map(|x| -x / cfg.tau_e).collect();
    let target = softmax(&scaled, 1.0)?;
    let blended: Vec<f64> = old
        .probs()
        .iter()
        .zip(target.probs())
        .map(|(o, t)| (1.0 - cfg.eta_e) * o + cfg.eta_e * t)
        .collect();
    interpretation.set_column(symbol, &Categorical::normalize(blended)?)
}
