//! Expected free energy, symbol inference, and acting on a symbol.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::AgentModel;
use crate::prob::{column_entropies, safe_ln, sample, softmax, Categorical, StochasticMatrix};

/// One-step expected free energy of every action, split into its two
/// nonnegative parts.
#[derive(Clone, Debug, PartialEq)]
pub struct EfeVector {
    ambiguity: Vec<f64>,
    risk: Vec<f64>,
    total: Vec<f64>,
}

impl EfeVector {
    pub fn from_parts(ambiguity: Vec<f64>, risk: Vec<f64>) -> Self {
        assert_eq!(ambiguity.len(), risk.len());
        let total = ambiguity.iter().zip(&risk).map(|(a, r)| a + r).collect();
        EfeVector {
            ambiguity,
            risk,
            total,
        }
    }

    /// Plain per-action values with no decomposition recorded.
    pub fn from_totals(total: Vec<f64>) -> Self {
        EfeVector {
            ambiguity: vec![0.0; total.len()],
            risk: total.clone(),
            total,
        }
    }

    /// `g`, one entry per action.
    pub fn values(&self) -> &[f64] {
        &self.total
    }

    pub fn ambiguity(&self) -> &[f64] {
        &self.ambiguity
    }

    pub fn risk(&self) -> &[f64] {
        &self.risk
    }

    pub fn len(&self) -> usize {
        self.total.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total.is_empty()
    }
}

/// `g[a]` = ambiguity + risk, where ambiguity is the expected likelihood
/// entropy under `B_a · φ` and risk is `KL(A · B_a · φ ‖ C)`.
pub fn expected_free_energy(model: &AgentModel) -> EfeVector {
    let entropies = column_entropies(model.likelihood());
    let log_pref: Vec<f64> = model.preference().probs().iter().map(|&c| safe_ln(c)).collect();
    let mut ambiguity = Vec::with_capacity(model.num_actions());
    let mut risk = Vec::with_capacity(model.num_actions());
    for a in 0..model.num_actions() {
        let states = model.predict_state(a).expect("action index in range");
        ambiguity.push(states.iter().zip(&entropies).map(|(s, h)| s * h).sum());
        let obs = model.likelihood().mul_vec(&states);
        risk.push(
            obs.iter()
                .zip(&log_pref)
                .filter(|(&q, _)| q > 0.0)
                .map(|(&q, &lc)| q * (safe_ln(q) - lc))
                .sum(),
        );
    }
    EfeVector::from_parts(ambiguity, risk)
}

/// Shared symbol-to-action map, `N_a × N_w`, one action distribution per
/// symbol column.
#[derive(Clone, Debug, PartialEq)]
pub struct SharedInterpretation {
    matrix: StochasticMatrix,
}

impl SharedInterpretation {
    /// Every symbol maps to every action with equal probability.
    pub fn uniform(num_actions: usize, num_symbols: usize) -> Self {
        SharedInterpretation {
            matrix: StochasticMatrix::uniform(num_actions, num_symbols),
        }
    }

    pub fn from_matrix(matrix: StochasticMatrix) -> Self {
        SharedInterpretation { matrix }
    }

    pub fn matrix(&self) -> &StochasticMatrix {
        &self.matrix
    }

    pub fn num_actions(&self) -> usize {
        self.matrix.rows()
    }

    pub fn num_symbols(&self) -> usize {
        self.matrix.cols()
    }

    /// Column `E[:, symbol]`.
    pub fn action_distribution(&self, symbol: usize) -> Result<Categorical> {
        if symbol >= self.num_symbols() {
            return Err(Error::IndexOutOfRange {
                index: symbol,
                dim: self.num_symbols(),
            });
        }
        Ok(Categorical::from_normalized(self.matrix.column(symbol)))
    }

    pub fn set_column(&mut self, symbol: usize, actions: &Categorical) -> Result<()> {
        self.matrix.set_column(symbol, actions)
    }
}

/// Expected free energy of the action drawn from each symbol, `Eᵀ g`.
pub fn symbol_scores(g: &EfeVector, interpretation: &SharedInterpretation) -> Result<Vec<f64>> {
    if g.len() != interpretation.num_actions() {
        return Err(Error::DimensionMismatch {
            expected: interpretation.num_actions(),
            actual: g.len(),
        });
    }
    Ok(interpretation.matrix().transpose_mul_vec(g.values()))
}

/// `ξ = softmax(−G_symbol)`.
pub fn symbol_distribution(scores: &[f64]) -> Result<Categorical> {
    let negated: Vec<f64> = scores.iter().map(|s| -s).collect();
    softmax(&negated, 1.0)
}

/// EFE and the symbol distribution `ξ` an agent would hold right now.
pub fn infer_symbols(
    model: &AgentModel,
    interpretation: &SharedInterpretation,
) -> Result<(EfeVector, Categorical)> {
    let g = expected_free_energy(model);
    let xi = symbol_distribution(&symbol_scores(&g, interpretation)?)?;
    Ok((g, xi))
}

/// Samples an action from `E[:, symbol]`.
pub fn select_action<R: Rng + ?Sized>(
    interpretation: &SharedInterpretation,
    symbol: usize,
    rng: &mut R,
) -> Result<usize> {
    Ok(sample(&interpretation.action_distribution(symbol)?, rng))
}
