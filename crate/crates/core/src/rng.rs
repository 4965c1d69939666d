//! Seeded randomness with stable substreams.
//!
//! Every stochastic operation in this crate takes an explicit `u64` seed and
//! derives the stream it needs from that seed plus fixed labels, so results
//! never depend on call order, thread scheduling, or global state.
//!
//! Two kinds of randomness are used:
//!
//! * bulk draws (point coordinates, Poisson sizes, Monte Carlo samples) come
//!   from a [`ChaCha8Rng`] seeded with a derived stream key;
//! * per-face thinning decisions are counter-based: a face's uniform draw is a
//!   pure hash of (seed, dimension, vertex tuple). Thinning therefore commutes
//!   with enumeration order, and raising survival probabilities with the same
//!   seed can only add faces (monotone coupling).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream label for point-cloud sampling inside a trial.
pub const STREAM_POINTS: u64 = 0x504f_494e_5453;
/// Stream label for thinning decisions inside a trial.
pub const STREAM_THINNING: u64 = 0x5448_494e;
/// Stream label for trial substreams of an experiment seed.
pub const STREAM_TRIAL: u64 = 0x0054_5249_414c;
/// Stream label for direct Monte Carlo integration.
pub const STREAM_MC: u64 = 0x004d_4349_4e54;
/// Stream label for per-point seeds of a sweep ladder.
pub const STREAM_SWEEP: u64 = 0x0053_5745_4550;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: a strong 64-bit bijective mixer.
#[inline]
fn finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn absorb(state: u64, word: u64) -> u64 {
    finalize(state.rotate_left(17) ^ word.wrapping_mul(GOLDEN))
}

/// Derives a stream key from a seed and a list of labels/indices.
pub fn derive(seed: u64, tags: &[u64]) -> u64 {
    let mut state = finalize(seed ^ GOLDEN);
    for &t in tags {
        state = absorb(state, t);
    }
    state
}

/// A ChaCha8 generator on the substream identified by `tags`.
pub fn stream(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, tags))
}

/// Uniform draw in [0, 1) keyed by (seed, face dimension, vertex tuple).
///
/// The same (seed, dim, face) always yields the same value, independent of
/// every other face, which is what makes thinning order-free and monotone
/// under coupled probability changes.
pub fn face_uniform(seed: u64, dim: usize, face: &[u32]) -> f64 {
    let mut state = derive(seed, &[STREAM_THINNING, dim as u64]);
    for &v in face {
        state = absorb(state, u64::from(v) + 1);
    }
    // Top 53 bits give a uniform dyadic rational in [0, 1).
    (state >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn derive_is_stable_and_tag_sensitive() {
        let a = derive(42, &[1, 2, 3]);
        let b = derive(42, &[1, 2, 3]);
        let c = derive(42, &[1, 3, 2]);
        let d = derive(43, &[1, 2, 3]);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn stream_reproduces_and_separates() {
        let mut r1 = stream(7, &[STREAM_POINTS]);
        let mut r2 = stream(7, &[STREAM_POINTS]);
        let mut r3 = stream(7, &[STREAM_THINNING]);
        let x1: [u64; 4] = core::array::from_fn(|_| r1.random());
        let x2: [u64; 4] = core::array::from_fn(|_| r2.random());
        let x3: [u64; 4] = core::array::from_fn(|_| r3.random());
        assert_eq!(x1, x2);
        assert_ne!(x1, x3);
    }

    #[test]
    fn face_uniform_in_unit_interval_and_deterministic() {
        let faces: [&[u32]; 4] = [&[0], &[0, 1], &[1, 2, 9], &[3, 4, 5, 6]];
        for (i, f) in faces.iter().enumerate() {
            let u = face_uniform(99, i, f);
            assert!((0.0..1.0).contains(&u));
            assert_eq!(u, face_uniform(99, i, f));
            assert_ne!(u, face_uniform(100, i, f));
        }
        // Distinct faces of the same dimension get distinct draws.
        assert_ne!(face_uniform(1, 1, &[0, 1]), face_uniform(1, 1, &[0, 2]));
    }

    #[test]
    fn face_uniform_mean_near_half() {
        // 20k faces, mean should be within 4 sigma = 4 / sqrt(12 * 20000).
        let mut sum = 0.0;
        let count = 20_000u32;
        for v in 0..count {
            sum += face_uniform(5, 1, &[v, v + 1]);
        }
        let mean = sum / count as f64;
        assert!((mean - 0.5).abs() < 4.0 / (12.0f64 * count as f64).sqrt(), "mean {mean}");
    }
}
