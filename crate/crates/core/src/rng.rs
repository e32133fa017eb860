//! Seeded random streams.
//!
//! Every stochastic step draws from its own ChaCha8 stream derived from the
//! caller's seed, so changing how one step consumes randomness never shifts
//! another step's draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Scenario = 1,
    InitialAssignment = 2,
    ClusterSeeding = 3,
}

pub fn stream(seed: u64, which: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}
