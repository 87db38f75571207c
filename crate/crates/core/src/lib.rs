//! Two interoceptive active-inference agents that learn a shared symbol
//! system through a Metropolis-Hastings naming game.
//!
//! Each agent has a discrete body (energy and temperature, six levels each),
//! a generative model of it, and a prior preference over what it wants to
//! feel. The agents never see each other's beliefs. On every exchange one
//! agent proposes a symbol, the other accepts or rejects it using only its
//! own symbol distribution, and then acts on the chosen symbol through a
//! symbol-to-action map both agents share. Along the way each agent learns
//! its observation likelihood, agents whose proposals get rejected move their
//! preferences toward the partner's, and the shared map learns which actions
//! each symbol should trigger.
//!
//! Module map:
//!
//! * [`prob`]: categorical distributions, softmax, entropy, divergences,
//!   sampling.
//! * [`body`]: the body grid, actions and exact transition matrices.
//! * [`model`]: one agent's generative model, state inference and
//!   observation prediction.
//! * [`policy`]: expected free energy and symbol inference.
//! * [`naming_game`]: the proposal/acceptance exchange.
//! * [`learning`]: likelihood, preference and interpretation updates.
//! * [`experiment`]: configuration, the online loop, metrics and run output.
//!
//! The `book/` directory at the repository root walks through the same
//! material chapter by chapter; its code samples are compiled as doctests of
//! this crate.

pub mod body;
pub mod error;
pub mod experiment;
pub mod learning;
pub mod model;
pub mod naming_game;
pub mod policy;
pub mod prob;
pub mod rng;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/distributions.md")]
    mod distributions {}
    #[doc = include_str!("../../../book/src/body.md")]
    mod body {}
    #[doc = include_str!("../../../book/src/inference.md")]
    mod inference {}
    #[doc = include_str!("../../../book/src/symbols.md")]
    mod symbols {}
    #[doc = include_str!("../../../book/src/naming_game.md")]
    mod naming_game {}
    #[doc = include_str!("../../../book/src/learning.md")]
    mod learning {}
    #[doc = include_str!("../../../book/src/running.md")]
    mod running {}
}
