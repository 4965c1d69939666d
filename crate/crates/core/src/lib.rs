//! Simulation kernels for soft random geometric simplicial complexes.
//!
//! A soft complex is built in three stages: sample a point cloud in a compact
//! domain, take the Rips or Cech complex at scale `r` (truncated at a chosen
//! top dimension), then thin it hierarchically: every face of dimension `i >= 1`
//! whose entire boundary survived is kept independently with probability `p_i`,
//! and vertices are never removed. The crate provides the samplers and complex
//! builders, Z2 homology, a census of small-component patterns, discrete Morse
//! gradient fields, and seeded Monte Carlo drivers over all of it.
//!
//! Everything is deterministic given the caller's `u64` seed: point sampling
//! and size draws use a seeded ChaCha8 stream, and per-face thinning decisions
//! are keyed by (seed, dimension, vertex tuple) so they do not depend on
//! enumeration order. The crate is `no_std` (with `alloc`); all floating-point
//! special functions go through `libm`, so results are bit-identical across
//! platforms.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod census;
pub mod complex;
pub mod experiments;
pub mod geometry;
pub mod homology;
pub mod morse;
pub mod rng;

mod fmath;

use alloc::string::String;

/// Error type shared by every module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A documented precondition of an operation was violated by the caller.
    Precondition(String),
    /// An internal invariant failed; always a bug in this crate.
    Invariant(String),
    /// A conditional estimator observed too few qualifying events to report.
    InsufficientEvents { observed: u64, required: u64 },
}

impl core::fmt::Display for Error {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::Invariant(msg) => write!(f, "internal invariant breached: {msg}"),
            Error::InsufficientEvents { observed, required } => write!(
                f,
                "insufficient events: observed {observed}, required at least {required}"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn precondition(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Precondition(msg()))
    }
}

/// Binomial coefficient as u64; arguments stay far below overflow here.
pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::binomial;

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(4, 5), 0);
        assert_eq!(binomial(52, 5), 2_598_960);
    }
}
