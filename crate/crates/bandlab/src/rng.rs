//! Reproducible, splittable random number streams.
//!
//! Every Monte-Carlo sample draws from its own ChaCha12 stream keyed by a
//! per-sample seed `baseSeed ⊕ sampleIndex`. Streams are independent of
//! thread scheduling: sample `i` sees the same bits whether the run uses
//! one worker or many, so results are bit-identical across thread counts.
//!
//! The 64-bit per-sample seed is expanded into the 256-bit ChaCha key with
//! a SplitMix64 chain, the standard remedy for the poor key diversity of
//! low-entropy seeds.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Per-sample seed recorded in run manifests: `base_seed ⊕ index`.
pub fn sample_seed(base_seed: u64, index: u64) -> u64 {
    base_seed ^ index
}

/// SplitMix64 step: advances the state and returns the next output.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// ChaCha12 stream keyed by a single 64-bit seed (SplitMix64-expanded).
pub fn stream_from_seed(seed: u64) -> ChaCha12Rng {
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha12Rng::from_seed(key)
}

/// Stream for sample `index` of a run with the given base seed.
pub fn sample_stream(base_seed: u64, index: u64) -> ChaCha12Rng {
    stream_from_seed(sample_seed(base_seed, index))
}
