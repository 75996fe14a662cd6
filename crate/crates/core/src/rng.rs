//! Deterministic seed derivation.
//!
//! Every randomized routine in this crate takes an explicit 64-bit seed and
//! derives independent sub-streams from it, so results are reproducible and
//! independent of thread scheduling. Replicate `r` of a Monte Carlo run uses
//! the ChaCha stream `r` of the run seed; structurally distinct uses of the
//! same seed (graph vs. noise vs. permutation plan) go through
//! [`derive_seed`] with distinct tags.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; good avalanche, cheap, stable.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derive a sub-seed from a base seed and a list of tags.
///
/// Distinct tag sequences give (for all practical purposes) independent
/// seeds; the same inputs always give the same output.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    let mut acc = splitmix64(base);
    for &t in tags {
        acc = splitmix64(acc ^ splitmix64(t));
    }
    acc
}

/// RNG for stream `stream` of `seed`.
///
/// Streams with the same seed are independent; this is the per-replicate
/// construction used by permutation nulls and experiment harnesses.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn derive_is_deterministic_and_tag_sensitive() {
        assert_eq!(derive_seed(7, &[1, 2]), derive_seed(7, &[1, 2]));
        assert_ne!(derive_seed(7, &[1, 2]), derive_seed(7, &[2, 1]));
        assert_ne!(derive_seed(7, &[1]), derive_seed(8, &[1]));
    }

    #[test]
    fn streams_differ() {
        let mut a = stream_rng(42, 0);
        let mut b = stream_rng(42, 1);
        assert_ne!(a.next_u64(), b.next_u64());
    }
}
