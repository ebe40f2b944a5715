//! Deterministic counter-based random streams.
//!
//! Every stochastic operation in this crate takes an explicit 64-bit seed and
//! derives independent streams by counter, never by wall clock or thread
//! identity. Parallel or re-ordered execution of sub-tasks therefore cannot
//! perturb results: stream `k` of seed `s` is always the same sequence.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Mixes a label into a seed (splitmix64 finalizer).
pub fn mix(seed: u64, label: u64) -> u64 {
    let mut z = seed ^ label.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Root stream for a seed.
pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derived stream `counter` of `seed`; distinct counters give independent
/// streams of the same generator (ChaCha stream splitting).
pub fn substream(seed: u64, counter: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(counter);
    rng
}
