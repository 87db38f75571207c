//! One agent's generative model: learned likelihood, fixed transitions,
//! prior preference, and the current state posterior.

use serde::{Deserialize, Serialize};

use crate::body::{BodyState, LEVELS, NUM_BODY_STATES};
use crate::error::{Error, Result};
use crate::policy::SharedInterpretation;
use crate::prob::{
    column_entropies, safe_ln, softmax, Categorical, OneHot, StochasticMatrix,
};

/// Shape of an initial prior preference over body observations.
///
/// Scores fall off linearly with the distance from a target energy and a
/// target temperature; the preference is their softmax.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreferenceTemplate {
    pub energy_target: f64,
    pub temperature_target: f64,
    pub energy_sharpness: f64,
    pub temperature_sharpness: f64,
}

impl PreferenceTemplate {
    /// Preference scores indexed by observation, centered to zero mean.
    pub fn scores(&self) -> Vec<f64> {
        let raw: Vec<f64> = BodyState::all()
            .map(|s| {
                -self.energy_sharpness * (s.energy() as f64 - self.energy_target).abs()
                    - self.temperature_sharpness
                        * (s.temperature() as f64 - self.temperature_target).abs()
            })
            .collect();
        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        raw.into_iter().map(|x| x - mean).collect()
    }
}

/// Dirichlet concentration parameters for the likelihood, one column per
/// hidden state.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletCounts {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DirichletCounts {
    pub fn constant(rows: usize, cols: usize, value: f64) -> Self {
        DirichletCounts {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn row_major(&self) -> &[f64] {
        &self.data
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Adds `weights` to one row.
    pub(crate) fn add_to_row(&mut self, row: usize, weights: &[f64]) {
        let slice = &mut self.data[row * self.cols..(row + 1) * self.cols];
        for (c, w) in slice.iter_mut().zip(weights) {
            *c += w;
        }
    }

    /// Expected likelihood under the Dirichlet: every column divided by its sum.
    pub fn expected_likelihood(&self) -> StochasticMatrix {
        let mut sums = vec![0.0; self.cols];
        for row in self.data.chunks_exact(self.cols) {
            for (s, c) in sums.iter_mut().zip(row) {
                *s += c;
            }
        }
        let data = self
            .data
            .chunks_exact(self.cols)
            .flat_map(|row| row.iter().zip(&sums).map(|(c, s)| c / s))
            .collect();
        StochasticMatrix::from_row_major(self.rows, self.cols, data)
            .expect("positive counts normalize to a stochastic matrix")
    }
}

#[derive(Clone, Debug)]
pub struct AgentModel {
    pub(crate) likelihood: StochasticMatrix,
    pub(crate) counts: DirichletCounts,
    pub(crate) transitions: Vec<StochasticMatrix>,
    pub(crate) preference: Categorical,
    pub(crate) preference_scores: Vec<f64>,
    pub(crate) initial_prior: Categorical,
    pub(crate) posterior: Categorical,
}

impl AgentModel {
    /// Builds an agent with a uniform likelihood (`count_prior` pseudo-counts in
    /// every cell), the given transitions, a uniform initial state prior, and
    /// the preference implied by `preference_scores`.
    pub fn new(
        num_obs: usize,
        transitions: Vec<StochasticMatrix>,
        preference_scores: Vec<f64>,
        count_prior: f64,
    ) -> Result<Self> {
        let num_states = transitions
            .first()
            .map(StochasticMatrix::rows)
            .ok_or_else(|| Error::Config("agent needs at least one action".into()))?;
        if num_obs == 0 || num_states == 0 {
            return Err(Error::Config("empty observation or state space".into()));
        }
        for b in &transitions {
            if b.rows() != num_states || b.cols() != num_states {
                return Err(Error::DimensionMismatch {
                    expected: num_states,
                    actual: if b.rows() != num_states { b.rows() } else { b.cols() },
                });
            }
        }
        if preference_scores.len() != num_obs {
            return Err(Error::DimensionMismatch {
                expected: num_obs,
                actual: preference_scores.len(),
            });
        }
        if !(count_prior.is_finite() && count_prior > 0.0) {
            return Err(Error::Config(format!(
                "count prior must be positive, got {count_prior}"
            )));
        }
        let counts = DirichletCounts::constant(num_obs, num_states, count_prior);
        let initial_prior = Categorical::uniform(num_states);
        Ok(AgentModel {
            likelihood: counts.expected_likelihood(),
            counts,
            transitions,
            preference: softmax(&preference_scores, 1.0)?,
            preference_scores,
            posterior: initial_prior.clone(),
            initial_prior,
        })
    }

    /// The 36-observation body agent with the given preference template.
    pub fn for_body(
        transitions: Vec<StochasticMatrix>,
        template: &PreferenceTemplate,
        count_prior: f64,
    ) -> Result<Self> {
        if transitions.iter().any(|b| b.rows() != NUM_BODY_STATES) {
            return Err(Error::DimensionMismatch {
                expected: NUM_BODY_STATES,
                actual: transitions[0].rows(),
            });
        }
        Self::new(NUM_BODY_STATES, transitions, template.scores(), count_prior)
    }

    pub fn num_obs(&self) -> usize {
        self.likelihood.rows()
    }

    pub fn num_states(&self) -> usize {
        self.likelihood.cols()
    }

    pub fn num_actions(&self) -> usize {
        self.transitions.len()
    }

    pub fn likelihood(&self) -> &StochasticMatrix {
        &self.likelihood
    }

    pub fn counts(&self) -> &DirichletCounts {
        &self.counts
    }

    pub fn transitions(&self) -> &[StochasticMatrix] {
        &self.transitions
    }

    pub fn preference(&self) -> &Categorical {
        &self.preference
    }

    pub fn preference_scores(&self) -> &[f64] {
        &self.preference_scores
    }

    pub fn initial_prior(&self) -> &Categorical {
        &self.initial_prior
    }

    pub fn posterior(&self) -> &Categorical {
        &self.posterior
    }

    /// Overrides the likelihood; counts are replaced by `a` itself, so the
    /// counts-likelihood invariant keeps holding.
    pub fn set_likelihood(&mut self, a: StochasticMatrix) -> Result<()> {
        self.check_shape(a.rows(), a.cols())?;
        self.counts = DirichletCounts {
            rows: a.rows(),
            cols: a.cols(),
            data: a.row_major().to_vec(),
        };
        self.likelihood = self.counts.expected_likelihood();
        Ok(())
    }

    pub fn set_posterior(&mut self, phi: Categorical) -> Result<()> {
        if phi.len() != self.num_states() {
            return Err(Error::DimensionMismatch {
                expected: self.num_states(),
                actual: phi.len(),
            });
        }
        self.posterior = phi;
        Ok(())
    }

    pub fn set_preference_scores(&mut self, scores: Vec<f64>) -> Result<()> {
        if scores.len() != self.num_obs() {
            return Err(Error::DimensionMismatch {
                expected: self.num_obs(),
                actual: scores.len(),
            });
        }
        self.preference = softmax(&scores, 1.0)?;
        self.preference_scores = scores;
        Ok(())
    }

    fn check_shape(&self, rows: usize, cols: usize) -> Result<()> {
        if rows != self.num_obs() {
            return Err(Error::DimensionMismatch {
                expected: self.num_obs(),
                actual: rows,
            });
        }
        if cols != self.num_states() {
            return Err(Error::DimensionMismatch {
                expected: self.num_states(),
                actual: cols,
            });
        }
        Ok(())
    }

    fn check_action(&self, action: usize) -> Result<()> {
        if action >= self.num_actions() {
            return Err(Error::IndexOutOfRange {
                index: action,
                dim: self.num_actions(),
            });
        }
        Ok(())
    }

    /// `B_a · φ`: the predicted state distribution one step after `action`.
    pub fn predict_state(&self, action: usize) -> Result<Vec<f64>> {
        self.check_action(action)?;
        Ok(self.transitions[action].mul_vec(self.posterior.probs()))
    }

    /// Posterior update after observing `obs`.
    ///
    /// The prior is `B_a · φ` for the action taken since the last update, or
    /// the current posterior when no transition happened (`None`). The
    /// posterior is the softmax of the log likelihood of `obs` under every
    /// state plus the log prior, and replaces the stored one.
    pub fn infer_state(&mut self, obs: &OneHot, prev_action: Option<usize>) -> Result<&Categorical> {
        if obs.dim() != self.num_obs() {
            return Err(Error::DimensionMismatch {
                expected: self.num_obs(),
                actual: obs.dim(),
            });
        }
        let prior = match prev_action {
            Some(a) => self.predict_state(a)?,
            None => self.posterior.probs().to_vec(),
        };
        let log_post: Vec<f64> = self
            .likelihood
            .row(obs.index())
            .iter()
            .zip(&prior)
            .map(|(&l, &p)| safe_ln(l) + safe_ln(p))
            .collect();
        self.posterior = softmax(&log_post, 1.0)?;
        Ok(&self.posterior)
    }

    /// `A · B_a · φ`: predicted observations after `action`.
    pub fn predict_obs(&self, action: usize) -> Result<Categorical> {
        let states = self.predict_state(action)?;
        Categorical::normalize(self.likelihood.mul_vec(&states))
    }

    /// Predicted observations for every action, in action order.
    pub fn predict_obs_all(&self) -> Vec<Categorical> {
        (0..self.num_actions())
            .map(|a| self.predict_obs(a).expect("action index in range"))
            .collect()
    }

    /// Predicted observations when acting on symbol `w`: the per-action
    /// predictions mixed with weights `E[:, w]`.
    pub fn predict_obs_given_symbol(
        &self,
        interpretation: &SharedInterpretation,
        symbol: usize,
    ) -> Result<Categorical> {
        mix_predictions(&self.predict_obs_all(), interpretation, symbol)
    }

    /// Mean entropy over the likelihood's columns.
    pub fn mean_likelihood_entropy(&self) -> f64 {
        let h = column_entropies(&self.likelihood);
        h.iter().sum::<f64>() / h.len() as f64
    }
}

/// `Σ_a E[a, w] · predictions[a]`.
pub fn mix_predictions(
    predictions: &[Categorical],
    interpretation: &SharedInterpretation,
    symbol: usize,
) -> Result<Categorical> {
    let weights = interpretation.action_distribution(symbol)?;
    if weights.len() != predictions.len() {
        return Err(Error::DimensionMismatch {
            expected: predictions.len(),
            actual: weights.len(),
        });
    }
    let n = predictions[0].len();
    let mut mixed = vec![0.0; n];
    for (pred, &w) in predictions.iter().zip(weights.probs()) {
        for (m, p) in mixed.iter_mut().zip(pred.probs()) {
            *m += w * p;
        }
    }
    Categorical::normalize(mixed)
}

/// Preference marginal over temperature levels: entry `t` sums `C` over all
/// energies at temperature `t`.
pub fn temperature_marginal(preference: &Categorical) -> Vec<f64> {
    let mut marginal = vec![0.0; LEVELS as usize];
    for (i, p) in preference.probs().iter().enumerate() {
        marginal[i % LEVELS as usize] += p;
    }
    marginal
}

/// Preference marginal over energy levels.
pub fn energy_marginal(preference: &Categorical) -> Vec<f64> {
    let mut marginal = vec![0.0; LEVELS as usize];
    for (i, p) in preference.probs().iter().enumerate() {
        marginal[i / LEVELS as usize] += p;
    }
    marginal
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::true_transitions;
    use crate::prob::{argmax, entropy};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn template(temperature_target: f64) -> PreferenceTemplate {
        PreferenceTemplate {
            energy_target: 2.5,
            temperature_target,
            energy_sharpness: 1.0,
            temperature_sharpness: 1.0,
        }
    }

    fn body_agent(temperature_target: f64) -> AgentModel {
        AgentModel::for_body(true_transitions(), &template(temperature_target), 1.0).unwrap()
    }

    fn random_categorical(rng: &mut ChaCha8Rng, n: usize) -> Categorical {
        Categorical::normalize((0..n).map(|_| rng.random::<f64>() + 1e-3).collect()).unwrap()
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> StochasticMatrix {
        let cols: Vec<_> = (0..cols).map(|_| random_categorical(rng, rows)).collect();
        StochasticMatrix::from_columns(&cols).unwrap()
    }

    #[test]
    fn initial_agent() {
        let agent = body_agent(5.0);
        let h = column_entropies(agent.likelihood());
        assert!(h.iter().all(|x| (x - 36f64.ln()).abs() < 1e-12));
        assert!((entropy(agent.initial_prior()) - 36f64.ln()).abs() < 1e-12);
        assert_eq!(agent.posterior(), agent.initial_prior());
        assert_eq!(agent.counts().total(), 36.0 * 36.0);
        let c = softmax(agent.preference_scores(), 1.0).unwrap();
        assert_eq!(&c, agent.preference());
    }

    #[test]
    fn opposed_temperature_preferences() {
        let a = body_agent(5.0);
        let b = body_agent(0.0);
        let peak_a = BodyState::decode(a.preference().argmax()).unwrap();
        let peak_b = BodyState::decode(b.preference().argmax()).unwrap();
        assert_eq!(peak_a.temperature(), 5);
        assert_eq!(peak_b.temperature(), 0);
        assert!(matches!(peak_a.energy(), 2 | 3));
        assert_eq!(argmax(&temperature_marginal(a.preference())), 5);
        assert_eq!(argmax(&temperature_marginal(b.preference())), 0);
    }

    #[test]
    fn rejects_mismatched_dimensions() {
        assert!(AgentModel::new(36, true_transitions(), vec![0.0; 35], 1.0).is_err());
        let bad = vec![StochasticMatrix::identity(36), StochasticMatrix::identity(4)];
        assert!(AgentModel::new(36, bad, vec![0.0; 36], 1.0).is_err());
        let small = vec![StochasticMatrix::identity(4)];
        assert!(AgentModel::for_body(small, &template(0.0), 1.0).is_err());
    }

    #[test]
    fn uniform_likelihood_identity_transition_keeps_uniform() {
        let mut agent =
            AgentModel::new(36, vec![StochasticMatrix::identity(36)], vec![0.0; 36], 1.0).unwrap();
        let obs = OneHot::new(17, 36).unwrap();
        let phi = agent.infer_state(&obs, Some(0)).unwrap();
        assert!(phi.probs().iter().all(|p| (p - 1.0 / 36.0).abs() < 1e-15));
    }

    #[test]
    fn identity_likelihood_localizes() {
        let mut agent =
            AgentModel::new(36, vec![StochasticMatrix::identity(36)], vec![0.0; 36], 1.0).unwrap();
        agent.set_likelihood(StochasticMatrix::identity(36)).unwrap();
        let phi = agent.infer_state(&OneHot::new(9, 36).unwrap(), Some(0)).unwrap();
        assert!((phi[9] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infer_state_is_product_of_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let b: Vec<_> = (0..3).map(|_| random_matrix(&mut rng, 6, 6)).collect();
            let mut agent = AgentModel::new(5, b, vec![0.0; 5], 1.0).unwrap();
            agent.set_likelihood(random_matrix(&mut rng, 5, 6)).unwrap();
            agent.set_posterior(random_categorical(&mut rng, 6)).unwrap();
            let o = rng.random_range(0..5);
            let a = rng.random_range(0..3);
            let prior = agent.transitions()[a].mul_vec(agent.posterior().probs());
            let product: Vec<f64> = agent
                .likelihood()
                .row(o)
                .iter()
                .zip(&prior)
                .map(|(l, p)| l * p)
                .collect();
            let expected = Categorical::normalize(product).unwrap();
            let phi = agent.infer_state(&OneHot::new(o, 5).unwrap(), Some(a)).unwrap();
            for (x, y) in phi.probs().iter().zip(expected.probs()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn infer_state_valid_for_every_observation_and_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut agent = body_agent(5.0);
        agent.set_likelihood(random_matrix(&mut rng, 36, 36)).unwrap();
        for o in 0..36 {
            for a in 0..5 {
                let mut probe = agent.clone();
                let phi = probe.infer_state(&OneHot::new(o, 36).unwrap(), Some(a)).unwrap();
                assert!(Categorical::new(phi.probs().to_vec()).is_ok());
            }
        }
    }

    #[test]
    fn identity_likelihood_tracks_true_state() {
        use crate::body::{step, Action};
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let deterministic = vec![
            true_transitions()[Action::Cool.index()].clone(),
            true_transitions()[Action::Warm.index()].clone(),
        ];
        let mut agent = AgentModel::new(36, deterministic, vec![0.0; 36], 1.0).unwrap();
        agent.set_likelihood(StochasticMatrix::identity(36)).unwrap();
        let mut state = BodyState::new(4, 1).unwrap();
        agent.infer_state(&state.encode(), None).unwrap();
        for _ in 0..200 {
            let a = rng.random_range(0..2);
            state = step(state, Action::ALL[a], &mut rng);
            let phi = agent.infer_state(&state.encode(), Some(a)).unwrap();
            assert_eq!(phi.argmax(), state.index());
        }
    }

    #[test]
    fn predict_obs_reference_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut agent =
            AgentModel::new(6, vec![StochasticMatrix::identity(6)], vec![0.0; 6], 1.0).unwrap();
        agent.set_likelihood(StochasticMatrix::identity(6)).unwrap();
        let phi = random_categorical(&mut rng, 6);
        agent.set_posterior(phi.clone()).unwrap();
        let q = agent.predict_obs(0).unwrap();
        assert!(q.probs().iter().zip(phi.probs()).all(|(a, b)| (a - b).abs() < 1e-15));

        let uniform = AgentModel::new(6, vec![random_matrix(&mut rng, 6, 6)], vec![0.0; 6], 1.0).unwrap();
        let q = uniform.predict_obs(0).unwrap();
        assert!(q.probs().iter().all(|p| (p - 1.0 / 6.0).abs() < 1e-15));
        assert!(uniform.predict_obs(1).is_err());
    }

    #[test]
    fn predict_obs_is_two_matrix_vector_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let b: Vec<_> = (0..2).map(|_| random_matrix(&mut rng, 4, 4)).collect();
        let mut agent = AgentModel::new(3, b, vec![0.0; 3], 1.0).unwrap();
        agent.set_likelihood(random_matrix(&mut rng, 3, 4)).unwrap();
        agent.set_posterior(random_categorical(&mut rng, 4)).unwrap();
        for a in 0..2 {
            let mut expected = [0.0; 3];
            for (o, e) in expected.iter_mut().enumerate() {
                for s in 0..4 {
                    let mut bs = 0.0;
                    for s0 in 0..4 {
                        bs += agent.transitions()[a].get(s, s0) * agent.posterior()[s0];
                    }
                    *e += agent.likelihood().get(o, s) * bs;
                }
            }
            let q = agent.predict_obs(a).unwrap();
            for (x, y) in q.probs().iter().zip(&expected) {
                assert!((x - y).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn symbol_prediction_mixes_action_predictions() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut agent = body_agent(0.0);
        agent.set_likelihood(random_matrix(&mut rng, 36, 36)).unwrap();
        agent.set_posterior(random_categorical(&mut rng, 36)).unwrap();
        let per_action = agent.predict_obs_all();

        let mut e = SharedInterpretation::uniform(5, 3);
        e.set_column(1, &Categorical::delta(5, 2)).unwrap();
        let mix_col = random_categorical(&mut rng, 5);
        e.set_column(2, &mix_col).unwrap();

        let delta = agent.predict_obs_given_symbol(&e, 1).unwrap();
        assert!(delta.probs().iter().zip(per_action[2].probs()).all(|(a, b)| (a - b).abs() < 1e-15));

        let mean = agent.predict_obs_given_symbol(&e, 0).unwrap();
        for o in 0..36 {
            let avg = per_action.iter().map(|p| p[o]).sum::<f64>() / 5.0;
            assert!((mean[o] - avg).abs() < 1e-15);
        }

        let mixed = agent.predict_obs_given_symbol(&e, 2).unwrap();
        for o in 0..36 {
            let explicit: f64 = (0..5).map(|a| mix_col[a] * per_action[a][o]).sum();
            assert!((mixed[o] - explicit).abs() < 1e-15);
            let lo = per_action.iter().map(|p| p[o]).fold(f64::INFINITY, f64::min);
            let hi = per_action.iter().map(|p| p[o]).fold(f64::NEG_INFINITY, f64::max);
            assert!(mixed[o] >= lo - 1e-15 && mixed[o] <= hi + 1e-15);
        }
    }
}
