//! The interoceptive body: energy and temperature on a 6×6 grid, the five
//! actions, and the exact transition matrices the agents are given.
//!
//! Observation index of a state is `6 · energy + temperature`. All changes
//! saturate at the grid boundary.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{OneHot, StochasticMatrix};
use crate::rng::SimRng;

/// Levels per interoceptive modality.
pub const LEVELS: u8 = 6;
/// Number of body states (and observations).
pub const NUM_BODY_STATES: usize = (LEVELS as usize) * (LEVELS as usize);
pub const NUM_ACTIONS: usize = 5;
/// Probability that a drift action nudges temperature.
pub const DRIFT_PROBABILITY: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    Cool = 0,
    Warm = 1,
    Eat = 2,
    Play = 3,
    Sleep = 4,
}

/// How an action changes temperature.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TemperatureEffect {
    Shift(i8),
    /// With [`DRIFT_PROBABILITY`], move one level away from the middle:
    /// down at 2 or below, up at 3 or above.
    Drift,
}

impl Action {
    pub const ALL: [Action; NUM_ACTIONS] = [
        Action::Cool,
        Action::Warm,
        Action::Eat,
        Action::Play,
        Action::Sleep,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Result<Self> {
        Action::ALL
            .get(index)
            .copied()
            .ok_or(Error::IndexOutOfRange {
                index,
                dim: NUM_ACTIONS,
            })
    }

    pub fn name(self) -> &'static str {
        match self {
            Action::Cool => "Cool",
            Action::Warm => "Warm",
            Action::Eat => "Eat",
            Action::Play => "Play",
            Action::Sleep => "Sleep",
        }
    }

    pub fn energy_delta(self) -> i8 {
        match self {
            Action::Cool | Action::Warm | Action::Play => -1,
            Action::Eat => 2,
            Action::Sleep => 0,
        }
    }

    pub fn temperature_effect(self) -> TemperatureEffect {
        match self {
            Action::Cool => TemperatureEffect::Shift(-1),
            Action::Warm => TemperatureEffect::Shift(1),
            Action::Eat | Action::Play | Action::Sleep => TemperatureEffect::Drift,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BodyState {
    energy: u8,
    temperature: u8,
}

impl BodyState {
    pub fn new(energy: u8, temperature: u8) -> Result<Self> {
        if energy >= LEVELS || temperature >= LEVELS {
            return Err(Error::InvalidBodyState {
                energy,
                temperature,
            });
        }
        Ok(BodyState {
            energy,
            temperature,
        })
    }

    pub fn energy(&self) -> u8 {
        self.energy
    }

    pub fn temperature(&self) -> u8 {
        self.temperature
    }

    pub fn index(&self) -> usize {
        LEVELS as usize * self.energy as usize + self.temperature as usize
    }

    pub fn encode(&self) -> OneHot {
        OneHot::new(self.index(), NUM_BODY_STATES).expect("state index is always in range")
    }

    pub fn decode(index: usize) -> Result<Self> {
        if index >= NUM_BODY_STATES {
            return Err(Error::IndexOutOfRange {
                index,
                dim: NUM_BODY_STATES,
            });
        }
        Ok(BodyState {
            energy: (index / LEVELS as usize) as u8,
            temperature: (index % LEVELS as usize) as u8,
        })
    }

    /// Every state, in observation-index order.
    pub fn all() -> impl Iterator<Item = BodyState> {
        (0..NUM_BODY_STATES).map(|i| BodyState::decode(i).unwrap())
    }

    fn shifted(self, energy_delta: i8, temperature_delta: i8) -> BodyState {
        BodyState {
            energy: saturating_shift(self.energy, energy_delta),
            temperature: saturating_shift(self.temperature, temperature_delta),
        }
    }
}

fn saturating_shift(level: u8, delta: i8) -> u8 {
    (level as i16 + delta as i16).clamp(0, LEVELS as i16 - 1) as u8
}

fn drift_direction(temperature: u8) -> i8 {
    if temperature <= 2 {
        -1
    } else {
        1
    }
}

/// Samples the successor of `state` under `action`.
pub fn step<R: Rng + ?Sized>(state: BodyState, action: Action, rng: &mut R) -> BodyState {
    let temperature_delta = match action.temperature_effect() {
        TemperatureEffect::Shift(d) => d,
        TemperatureEffect::Drift => {
            if rng.random::<f64>() < DRIFT_PROBABILITY {
                drift_direction(state.temperature)
            } else {
                0
            }
        }
    };
    state.shifted(action.energy_delta(), temperature_delta)
}

/// Exact transition matrices, one per action in [`Action::ALL`] order.
/// Entry `(s', s)` is the probability that `step` moves `s` to `s'`.
pub fn true_transitions() -> Vec<StochasticMatrix> {
    Action::ALL
        .iter()
        .map(|&action| {
            let n = NUM_BODY_STATES;
            let mut data = vec![0.0; n * n];
            for from in BodyState::all() {
                let outcomes: &[(i8, f64)] = match action.temperature_effect() {
                    TemperatureEffect::Shift(d) => &[(d, 1.0)],
                    TemperatureEffect::Drift => &[
                        (0, 1.0 - DRIFT_PROBABILITY),
                        (drift_direction(from.temperature), DRIFT_PROBABILITY),
                    ],
                };
                for &(dt, p) in outcomes {
                    let to = from.shifted(action.energy_delta(), dt);
                    data[to.index() * n + from.index()] += p;
                }
            }
            StochasticMatrix::from_row_major(n, n, data).expect("transition columns sum to one")
        })
        .collect()
}

/// One agent's body, driven by its own random stream.
#[derive(Clone, Debug)]
pub struct BodyEnv {
    state: BodyState,
    rng: SimRng,
}

impl BodyEnv {
    /// Starts from a state drawn uniformly over the grid.
    pub fn new_uniform(mut rng: SimRng) -> Self {
        let index = rng.random_range(0..NUM_BODY_STATES);
        BodyEnv {
            state: BodyState::decode(index).unwrap(),
            rng,
        }
    }

    pub fn with_state(state: BodyState, rng: SimRng) -> Self {
        BodyEnv { state, rng }
    }

    pub fn state(&self) -> BodyState {
        self.state
    }

    pub fn step(&mut self, action: Action) -> BodyState {
        self.state = step(self.state, action, &mut self.rng);
        self.state
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn st(e: u8, t: u8) -> BodyState {
        BodyState::new(e, t).unwrap()
    }

    #[test]
    fn encoding() {
        assert_eq!(st(0, 0).index(), 0);
        assert_eq!(st(5, 5).index(), 35);
        assert_eq!(st(3, 2).index(), 20);
        for i in 0..NUM_BODY_STATES {
            assert_eq!(BodyState::decode(i).unwrap().index(), i);
        }
        assert!(BodyState::new(6, 0).is_err());
        assert!(BodyState::decode(36).is_err());
    }

    #[test]
    fn deterministic_actions() {
        let mut rng = SimRng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(step(st(3, 3), Action::Cool, &mut rng), st(2, 2));
            assert_eq!(step(st(3, 3), Action::Warm, &mut rng), st(2, 4));
            assert_eq!(step(st(0, 0), Action::Cool, &mut rng), st(0, 0));
            assert_eq!(step(st(0, 5), Action::Warm, &mut rng), st(0, 5));
        }
    }

    #[test]
    fn eat_saturates_energy_and_drifts() {
        let mut rng = SimRng::seed_from_u64(9);
        let n = 100_000;
        let mut drifted = 0;
        for _ in 0..n {
            match step(st(4, 2), Action::Eat, &mut rng) {
                s if s == st(5, 2) => {}
                s if s == st(5, 1) => drifted += 1,
                other => panic!("unexpected successor {other:?}"),
            }
        }
        let f = drifted as f64 / n as f64;
        assert!((f - 0.2).abs() < 0.005, "{f}");
    }

    #[test]
    fn transition_columns() {
        let b = true_transitions();
        assert_eq!(b.len(), NUM_ACTIONS);
        let from = st(3, 3).index();
        assert_eq!(b[Action::Cool.index()].get(st(2, 2).index(), from), 1.0);
        let sleep = &b[Action::Sleep.index()];
        assert_eq!(sleep.get(st(3, 3).index(), from), 0.8);
        assert_eq!(sleep.get(st(3, 4).index(), from), 0.2);
        // drift at the boundary merges into "unchanged"
        assert_eq!(sleep.get(st(3, 0).index(), st(3, 0).index()), 1.0);
        assert_eq!(sleep.get(st(3, 5).index(), st(3, 5).index()), 1.0);
        for m in &b {
            assert!(m.max_column_sum_error() < 1e-12);
        }
    }

    #[test]
    fn transition_sparsity() {
        let b = true_transitions();
        for action in Action::ALL {
            let m = &b[action.index()];
            for s in 0..NUM_BODY_STATES {
                let mut nz: Vec<f64> = m.column(s).into_iter().filter(|&p| p > 0.0).collect();
                nz.sort_by(f64::total_cmp);
                match action.temperature_effect() {
                    TemperatureEffect::Shift(_) => assert_eq!(nz, vec![1.0]),
                    TemperatureEffect::Drift => {
                        assert!(nz == vec![1.0] || nz == vec![0.2, 0.8], "{action:?} {s}: {nz:?}")
                    }
                }
            }
        }
    }
}
