//! Deterministic random stream derivation.
//!
//! Every Monte-Carlo loop in this workspace draws from a stream derived
//! from `(seed, tags, index)`. Streams are independent of scheduling
//! order, so parallel runs reproduce single-threaded results exactly.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

/// Derive an independent ChaCha stream from a base seed, a tag path and
/// a stream index.
pub fn derive_rng(seed: u64, tags: &[&str], index: u64) -> ChaCha12Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    for tag in tags {
        hasher.update([tag.len() as u8]);
        hasher.update(tag.as_bytes());
    }
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha12Rng::from_seed(key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn same_inputs_same_stream() {
        let mut a = derive_rng(7, &["fig6", "user"], 42);
        let mut b = derive_rng(7, &["fig6", "user"], 42);
        assert_eq!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn distinct_tags_decorrelate() {
        let mut a = derive_rng(7, &["fig6", "user"], 42);
        let mut b = derive_rng(7, &["fig7", "user"], 42);
        let mut c = derive_rng(7, &["fig6", "user"], 43);
        let x = a.next_u64();
        assert_ne!(x, b.next_u64());
        assert_ne!(x, c.next_u64());
    }

    #[test]
    fn tag_boundaries_matter() {
        // ["ab", "c"] and ["a", "bc"] must not collide
        let mut a = derive_rng(0, &["ab", "c"], 0);
        let mut b = derive_rng(0, &["a", "bc"], 0);
        assert_ne!(a.next_u64(), b.next_u64());
    }
}
