//! Seeded random number generation.
//!
//! Every trial owns one [`PlannerRng`], a ChaCha8 stream cipher generator.
//! ChaCha output is specified bit-for-bit, so a seed reproduces the same run
//! on every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type PlannerRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> PlannerRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives a child seed from a parent seed and a list of labels.
///
/// The derivation is SHA-256 over the little-endian parent seed followed by
/// each label with a separator, truncated to the first eight bytes.
pub fn derive_seed(parent: u64, labels: &[&str]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(parent.to_le_bytes());
    for label in labels {
        hasher.update([0x1f]);
        hasher.update(label.as_bytes());
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}
