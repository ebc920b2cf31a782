//! Hierarchical seeding: campaign seed -> point seed -> trial seed -> stream.
//!
//! Every random draw in a trial comes from a generator that depends only on
//! `(seed, trial_index, stream)`, so results do not depend on execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent random streams used inside one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    /// Temporal mismatch, frequency offset and channel coefficients.
    Channel = 1,
    InterfererData = 2,
    SignalData = 3,
    Noise = 4,
    /// Intra-link carrier offset and preamble sequences.
    Sync = 5,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for `child` under `parent`.
pub fn derive_seed(parent: u64, child: u64) -> u64 {
    splitmix64(splitmix64(parent) ^ child.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// Seed for a named campaign point (e.g. one p_r value, one scheme).
pub fn point_seed(seed: u64, label: &str) -> u64 {
    // FNV-1a over the label keeps the mapping stable across builds.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    derive_seed(seed, h)
}

pub fn trial_rng(seed: u64, trial_index: u64, stream: Stream) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(derive_seed(seed, trial_index), stream as u64))
}
