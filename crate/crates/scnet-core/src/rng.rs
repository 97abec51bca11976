//! Deterministic random streams.
//!
//! All randomness in this crate flows from one master seed. Sub-seeds are
//! derived by a documented, stable hash of `(parent seed, purpose tag, index)`
//! so that independent streams can be handed to parallel workers without any
//! coordination, and so that the draws made for one purpose never shift when
//! another purpose consumes more or fewer values. In particular, each dataset
//! sample owns its own scenario stream, and each path within a scenario owns
//! its own sub-stream — changing the path count P therefore leaves the draws
//! of the first `min(P, P')` paths untouched, which the path-count robustness
//! sweep relies on to compare deployments under common random numbers.
//!
//! The generator is ChaCha with 8 rounds: fast, high quality, and with a
//! stable, documented output sequence (unlike `StdRng`, whose algorithm may
//! change between releases).

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One mixing round of the splitmix64 finalizer. Statistically strong for
/// seed derivation; not intended for cryptography.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `(parent, purpose, index)`.
///
/// The purpose tag keeps streams for different uses (scenario sampling,
/// estimation noise, weight init, shuffling, …) disjoint even when they share
/// an index. The scheme is frozen: absorb the tag bytes in 8-byte little-endian
/// chunks (zero-padded), then the index, mixing after every absorption.
pub fn derive_seed(parent: u64, purpose: &str, index: u64) -> u64 {
    let mut state = mix(parent);
    for chunk in purpose.as_bytes().chunks(8) {
        let mut word = [0u8; 8];
        word[..chunk.len()].copy_from_slice(chunk);
        state = mix(state ^ u64::from_le_bytes(word));
    }
    mix(state ^ index)
}

/// Builds the ChaCha stream for a derived seed.
///
/// The 256-bit ChaCha key is expanded from the seed by iterating [`mix`], so
/// the mapping from seed to stream is fixed by this crate, independent of any
/// `SeedableRng::seed_from_u64` implementation detail.
pub fn stream(seed: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut s = seed;
    for chunk in key.chunks_exact_mut(8) {
        s = mix(s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn test_derive_seed_is_deterministic() {
        assert_eq!(derive_seed(42, "scenario", 7), derive_seed(42, "scenario", 7));
    }

    #[test]
    fn test_derive_seed_separates_purposes_and_indices() {
        let a = derive_seed(42, "scenario", 0);
        let b = derive_seed(42, "noise", 0);
        let c = derive_seed(42, "scenario", 1);
        let d = derive_seed(43, "scenario", 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
        assert_ne!(b, c);
    }

    #[test]
    fn test_purpose_tags_longer_than_one_chunk() {
        // Tags over 8 bytes must still influence the result beyond their prefix.
        let a = derive_seed(1, "angular-spread-A", 0);
        let b = derive_seed(1, "angular-spread-B", 0);
        assert_ne!(a, b);
    }

    #[test]
    fn test_stream_reproduces_identical_sequences() {
        let mut r1 = stream(derive_seed(9, "test", 3));
        let mut r2 = stream(derive_seed(9, "test", 3));
        for _ in 0..100 {
            assert_eq!(r1.random::<u64>(), r2.random::<u64>());
        }
    }

    #[test]
    fn test_streams_from_different_seeds_differ() {
        let mut r1 = stream(1);
        let mut r2 = stream(2);
        let same = (0..16).filter(|_| r1.random::<u64>() == r2.random::<u64>()).count();
        assert_eq!(same, 0, "distinct seeds should give unrelated streams");
    }

    #[test]
    fn test_uniform_draws_pass_chi_square() {
        // 64-bin uniformity check on f64 draws; dof = 63, 1% critical value
        // 92.0100 (chi-square upper quantile).
        let mut rng = stream(derive_seed(123, "uniformity", 0));
        let n = 100_000;
        let mut bins = [0usize; 64];
        for _ in 0..n {
            let u: f64 = rng.random();
            assert!((0.0..1.0).contains(&u));
            bins[(u * 64.0) as usize] += 1;
        }
        let expect = n as f64 / 64.0;
        let chi2: f64 = bins.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
        assert!(chi2 < 92.0100236, "chi-square statistic {chi2} exceeds the 1% critical value");
    }
}
