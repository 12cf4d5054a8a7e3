//! Seeded random streams.
//!
//! Every random draw comes from a ChaCha8 generator keyed by the master seed.
//! Independent substreams are selected with ChaCha's 64-bit stream id, laid
//! out as `(trial_index << 8) | purpose`. A trial's channel realisation and
//! each method's internal randomness therefore never depend on which other
//! methods ran, on execution order, or on the degree of parallelism.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// What a substream is used for within one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Purpose {
    Channel = 0,
    RandomPhases = 1,
    SdpInit = 2,
    Randomization = 3,
    Validation = 0xff,
}

pub fn stream(seed: u64, trial_index: u64, purpose: Purpose) -> SimRng {
    assert!(trial_index < (1 << 56), "trial index out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((trial_index << 8) | purpose as u64);
    rng
}

/// A standalone stream for callers that only have a seed (tests, tools).
pub fn from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}
