//! Counter-based random streams.
//!
//! Every independent unit of work (an optimizer start, an experiment trial)
//! draws from its own ChaCha stream selected by index, so the results do not
//! depend on the order or the thread in which the units run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Keeps trial streams disjoint from optimizer-start streams under one seed.
const TRIAL_DOMAIN: u64 = 0x7472_6961_6c73_0001;

/// Stream `index` of the master `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Stream used by optimizer start `start`.
pub fn start_stream(seed: u64, start: usize) -> ChaCha8Rng {
    stream(seed, start as u64)
}

/// Stream used by experiment trial `trial`.
pub fn trial_stream(seed: u64, trial: usize) -> ChaCha8Rng {
    stream(seed ^ TRIAL_DOMAIN, trial as u64)
}
