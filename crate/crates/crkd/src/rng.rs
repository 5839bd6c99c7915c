//! Deterministic stream derivation.
//!
//! Every source of randomness in the pipeline is a ChaCha8 stream derived
//! from a master seed plus a purpose label and indices. Re-deriving the
//! stream for (seed, purpose, indices) always yields the same generator, so
//! resuming a run at any epoch reproduces the original sequence without
//! serializing generator internals.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Derive an independent RNG stream from a master seed.
///
/// `purpose` separates uses (shuffling, augmentation, init, ...) and
/// `indices` separates repetitions of the same use (epoch, step, sample).
pub fn derive_rng(master_seed: u64, purpose: &str, indices: &[u64]) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_le_bytes());
    hasher.update([0xfe]);
    hasher.update(purpose.as_bytes());
    for idx in indices {
        hasher.update([0xff]);
        hasher.update(idx.to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(seed)
}
