//! Per-run random streams.
//!
//! A run seed is expanded into five independent ChaCha8 streams that share the
//! seed and differ in stream id. The order is fixed so that CSV output is
//! reproducible bit for bit:
//!
//! | stream id | owner                               |
//! |-----------|-------------------------------------|
//! | 0         | body of agent A                     |
//! | 1         | body of agent B                     |
//! | 2         | agent A (action selection)          |
//! | 3         | agent B (action selection)          |
//! | 4         | naming game (proposals, acceptance) |

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct RngStreams {
    pub env_a: SimRng,
    pub env_b: SimRng,
    pub agent_a: SimRng,
    pub agent_b: SimRng,
    pub game: SimRng,
}

impl RngStreams {
    pub fn from_seed(seed: u64) -> Self {
        let stream = |id: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(id);
            rng
        };
        RngStreams {
            env_a: stream(0),
            env_b: stream(1),
            agent_a: stream(2),
            agent_b: stream(3),
            game: stream(4),
        }
    }
}
