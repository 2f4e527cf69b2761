//! Seeded random sources.
//!
//! All randomness flows through [`SolverRng`] (ChaCha8 seeded from a `u64`),
//! so a seed pins down every block draw and every generated system on any
//! platform. Normal variates use the Box–Muller cosine branch:
//! `z = sqrt(-2 ln(1 - u1)) · cos(2π u2)` with `u1, u2` uniform on `[0, 1)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SolverRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SolverRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn normal_vec<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| standard_normal(rng)).collect()
}

/// Deterministic per-trial seed derived from a master seed (SplitMix64 step).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
