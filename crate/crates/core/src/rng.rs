//! Deterministic random streams.
//!
//! Every random choice in the pipeline flows from one master seed through
//! named substreams, so that runs are reproducible regardless of worker
//! count: each (stage, index) pair gets its own generator instead of
//! sharing a sequential one.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// SplitMix64 step; a stable 64-bit mixer.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// FNV-1a over the label bytes. Stable across platforms and releases,
/// unlike `DefaultHasher`.
fn hash_label(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Combine a seed with a salt value.
pub fn mix(seed: u64, salt: u64) -> u64 {
    splitmix64(seed ^ splitmix64(salt))
}

/// Derived seed for a named substream.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    mix(master, hash_label(label))
}

/// Derived seed for an indexed instance of a named substream.
pub fn derive_seed_indexed(master: u64, label: &str, index: u64) -> u64 {
    mix(derive_seed(master, label), index)
}

/// Generator for a named substream of the master seed.
pub fn substream(master: u64, label: &str) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(derive_seed(master, label))
}

/// Generator for stream `label[index]`, e.g. one per fold or per tree.
pub fn substream_indexed(master: u64, label: &str, index: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(derive_seed_indexed(master, label, index))
}
