//! Deterministic random streams.
//!
//! Every simulation draws from its own ChaCha8 stream whose seed is derived from
//! a master seed and stream coordinates, so results never depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type SimRng = ChaCha8Rng;

/// Build a generator from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for stream `(a, b)` under `master`, e.g. `(iteration, candidate)`.
pub fn derive_seed(master: u64, a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ a) ^ b.rotate_left(32))
}

/// Stream tags for draws that are not per-candidate.
pub mod stream {
    pub const NOISE: u64 = 0x6e6f_6973_6500_0001;
    pub const PRIOR: u64 = 0x7072_696f_7200_0002;
    pub const PROPOSAL: u64 = 0x7072_6f70_0000_0003;
    pub const PSEUDO_OBS: u64 = 0x7073_6f62_7300_0004;
    pub const MODEL_CALL: u64 = 0x6361_6c6c_0000_0005;
}
