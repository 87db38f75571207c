//! A single Metropolis-Hastings naming game exchange.
//!
//! The speaker proposes a symbol drawn from its own symbol distribution. The
//! listener accepts it with probability `min(1, r)`, where `r` is the ratio of
//! the listener's probabilities for the proposed and its own symbol. Because
//! the proposal is the speaker's distribution, an independence sampler built
//! from repeated exchanges targets the normalized product of both agents'
//! distributions; the normalizer cancels in `r` and is never computed.

use rand::Rng;
use serde::Serialize;

use crate::prob::{sample, Categorical, LOG_FLOOR};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExchangeOutcome {
    pub speaker_symbol: usize,
    pub listener_symbol: usize,
    /// The symbol the listener acts on.
    pub used_symbol: usize,
    pub accepted: bool,
    pub acceptance_ratio: f64,
}

/// Speaker's proposal, drawn from its own `ξ`.
pub fn propose<R: Rng + ?Sized>(xi_speaker: &Categorical, rng: &mut R) -> usize {
    sample(xi_speaker, rng)
}

/// `ξ_Li[w_sp] / ξ_Li[w_li]`, with both probabilities floored.
pub fn acceptance_ratio(xi_listener: &Categorical, proposed: usize, current: usize) -> f64 {
    if proposed == current {
        return 1.0;
    }
    xi_listener[proposed].max(LOG_FLOOR) / xi_listener[current].max(LOG_FLOOR)
}

/// Accept-or-reject step given both symbols. Always consumes exactly one
/// uniform draw.
pub fn decide<R: Rng + ?Sized>(
    xi_listener: &Categorical,
    proposed: usize,
    current: usize,
    rng: &mut R,
) -> ExchangeOutcome {
    let r = acceptance_ratio(xi_listener, proposed, current);
    let u: f64 = rng.random();
    let accepted = u < r.min(1.0);
    ExchangeOutcome {
        speaker_symbol: proposed,
        listener_symbol: current,
        used_symbol: if accepted { proposed } else { current },
        accepted,
        acceptance_ratio: r,
    }
}

/// Full exchange: speaker proposes, listener draws its own symbol, then the
/// acceptance test picks the used symbol. Draw order on `rng`: proposal,
/// listener symbol, acceptance uniform.
pub fn exchange<R: Rng + ?Sized>(
    xi_speaker: &Categorical,
    xi_listener: &Categorical,
    rng: &mut R,
) -> ExchangeOutcome {
    let proposed = propose(xi_speaker, rng);
    let current = sample(xi_listener, rng);
    decide(xi_listener, proposed, current, rng)
}
