//! Seeded random streams.
//!
//! Every stochastic component takes an explicit [`SimRng`]. Child seeds are
//! derived from a master seed and a list of integer coordinates with the
//! SplitMix64 finalizer, so the seed of any work unit depends only on its
//! position in a sweep and never on execution order:
//!
//! ```text
//! mix64(z):  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//!            z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//!            return z ^ (z >> 31)
//!
//! derive_seed(master, [p0, p1, ...]):
//!            h = mix64(master)
//!            for p in parts: h = mix64(h + 0x9e3779b97f4a7c15 + mix64(p))
//!            return h
//! ```
//!
//! (all arithmetic wrapping on u64). A seed becomes a stream through
//! `ChaCha8Rng::seed_from_u64`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(mix64(master), |h, &p| {
        mix64(h.wrapping_add(GOLDEN_GAMMA).wrapping_add(mix64(p)))
    })
}

pub fn stream(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}
