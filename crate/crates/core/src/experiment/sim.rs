//! The online loop: each exchange lets both agents infer symbols, runs the
//! naming game, moves the listener's body, and applies whichever learning
//! rule the current phase allows.

use std::collections::VecDeque;

use serde::Serialize;

use crate::body::{true_transitions, Action, BodyEnv, BodyState};
use crate::error::Result;
use crate::experiment::config::{RoleScheme, RunConfig};
use crate::learning::{
    phase, preference_gate_open, update_interpretation, update_likelihood_counts,
    update_preference, LearningConfig, Phase,
};
use crate::model::AgentModel;
use crate::naming_game::{exchange, ExchangeOutcome};
use crate::policy::{infer_symbols, select_action, SharedInterpretation};
use crate::prob::js_divergence;
use crate::rng::{RngStreams, SimRng};

/// Trailing window, in exchanges, of the logged acceptance rate.
pub const ACCEPTANCE_WINDOW: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum AgentId {
    A,
    B,
}

impl AgentId {
    pub fn index(self) -> usize {
        match self {
            AgentId::A => 0,
            AgentId::B => 1,
        }
    }

    pub fn other(self) -> AgentId {
        match self {
            AgentId::A => AgentId::B,
            AgentId::B => AgentId::A,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AgentId::A => "A",
            AgentId::B => "B",
        }
    }
}

/// One row of the exchange log. Body states, divergence and entropies are
/// recorded after the exchange's updates.
#[derive(Clone, Debug, PartialEq)]
pub struct StepLog {
    pub step: u64,
    /// Exchange index within the step.
    pub exchange: u8,
    pub listener: AgentId,
    pub speaker: AgentId,
    pub outcome: ExchangeOutcome,
    pub action: Action,
    pub body_a: BodyState,
    pub body_b: BodyState,
    pub jsd_c: f64,
    pub acceptance_rate: f64,
    pub entropy_a: f64,
    pub entropy_b: f64,
    pub phase: Phase,
    /// Whether the speaker's preference gate was open during the exchange.
    pub gate_speaker: bool,
    /// Whether the speaker's preference scores were changed.
    pub preference_updated: bool,
}

pub struct Simulation {
    config: RunConfig,
    learning: LearningConfig,
    agents: [AgentModel; 2],
    bodies: [BodyEnv; 2],
    agent_rngs: [SimRng; 2],
    game_rng: SimRng,
    interpretation: SharedInterpretation,
    step: u64,
    recent_acceptances: VecDeque<bool>,
    observations: [u64; 2],
}

impl Simulation {
    /// Validates the config, builds both agents and bodies, and lets each
    /// agent take in its initial observation.
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let learning = config.learning();
        let RngStreams {
            env_a,
            env_b,
            agent_a,
            agent_b,
            game,
        } = RngStreams::from_seed(config.seed);
        let transitions = true_transitions();
        let agents = [
            AgentModel::for_body(
                transitions.clone(),
                &config.preference_template_a(),
                config.count_prior,
            )?,
            AgentModel::for_body(transitions, &config.preference_template_b(), config.count_prior)?,
        ];
        let mut sim = Simulation {
            interpretation: SharedInterpretation::uniform(config.num_actions, config.num_symbols),
            learning,
            agents,
            bodies: [BodyEnv::new_uniform(env_a), BodyEnv::new_uniform(env_b)],
            agent_rngs: [agent_a, agent_b],
            game_rng: game,
            step: 0,
            recent_acceptances: VecDeque::with_capacity(ACCEPTANCE_WINDOW),
            observations: [0; 2],
            config,
        };
        for id in [AgentId::A, AgentId::B] {
            sim.observe(id, None)?;
        }
        Ok(sim)
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn agent(&self, id: AgentId) -> &AgentModel {
        &self.agents[id.index()]
    }

    pub fn body(&self, id: AgentId) -> BodyState {
        self.bodies[id.index()].state()
    }

    pub fn interpretation(&self) -> &SharedInterpretation {
        &self.interpretation
    }

    /// Steps completed so far.
    pub fn step_index(&self) -> u64 {
        self.step
    }

    /// Observations taken in by an agent, including the initial one.
    pub fn observations(&self, id: AgentId) -> u64 {
        self.observations[id.index()]
    }

    pub fn preference_divergence(&self) -> f64 {
        js_divergence(self.agents[0].preference(), self.agents[1].preference())
            .expect("both agents share the observation space")
    }

    fn observe(&mut self, id: AgentId, action: Option<usize>) -> Result<()> {
        let obs = self.bodies[id.index()].state().encode();
        let agent = &mut self.agents[id.index()];
        let phi = agent.infer_state(&obs, action)?.clone();
        update_likelihood_counts(agent, &obs, &phi)?;
        self.observations[id.index()] += 1;
        Ok(())
    }

    fn listeners_for_step(&self) -> &'static [AgentId] {
        match self.config.role_scheme {
            RoleScheme::DoubleExchange => &[AgentId::A, AgentId::B],
            RoleScheme::AlternateSteps if self.step % 2 == 0 => &[AgentId::A],
            RoleScheme::AlternateSteps => &[AgentId::B],
        }
    }

    /// Runs one time step and returns its exchange records.
    pub fn run_step(&mut self) -> Result<Vec<StepLog>> {
        let logs = self
            .listeners_for_step()
            .iter()
            .enumerate()
            .map(|(k, &listener)| self.run_exchange(listener, k as u8))
            .collect::<Result<Vec<_>>>()?;
        self.step += 1;
        Ok(logs)
    }

    fn run_exchange(&mut self, listener: AgentId, exchange_index: u8) -> Result<StepLog> {
        let speaker = listener.other();
        let (li, sp) = (listener.index(), speaker.index());
        let current_phase = phase(self.step, &self.learning);

        let (g_listener, xi_listener) = infer_symbols(&self.agents[li], &self.interpretation)?;
        let (_, xi_speaker) = infer_symbols(&self.agents[sp], &self.interpretation)?;
        let outcome = exchange(&xi_speaker, &xi_listener, &mut self.game_rng);

        let action = select_action(
            &self.interpretation,
            outcome.used_symbol,
            &mut self.agent_rngs[li],
        )?;
        self.bodies[li].step(Action::from_index(action)?);
        self.observe(listener, Some(action))?;

        let gate_speaker = preference_gate_open(&self.agents[sp], &self.learning);
        let mut preference_updated = false;
        match current_phase {
            Phase::Preference if !outcome.accepted => {
                preference_updated = update_preference(
                    &mut self.agents[sp],
                    &self.interpretation,
                    outcome.listener_symbol,
                    outcome.speaker_symbol,
                    &self.learning,
                )?;
            }
            Phase::Preference => {}
            Phase::Interpretation => {
                update_interpretation(
                    &mut self.interpretation,
                    outcome.used_symbol,
                    &g_listener,
                    &self.learning,
                )?;
            }
        }

        if self.recent_acceptances.len() == ACCEPTANCE_WINDOW {
            self.recent_acceptances.pop_front();
        }
        self.recent_acceptances.push_back(outcome.accepted);
        let accepted = self.recent_acceptances.iter().filter(|&&a| a).count();

        Ok(StepLog {
            step: self.step,
            exchange: exchange_index,
            listener,
            speaker,
            outcome,
            action: Action::from_index(action)?,
            body_a: self.bodies[0].state(),
            body_b: self.bodies[1].state(),
            jsd_c: self.preference_divergence(),
            acceptance_rate: accepted as f64 / self.recent_acceptances.len() as f64,
            entropy_a: self.agents[0].mean_likelihood_entropy(),
            entropy_b: self.agents[1].mean_likelihood_entropy(),
            phase: current_phase,
            gate_speaker,
            preference_updated,
        })
    }
}
