//! Seeded random source shared by every sampler.
//!
//! All randomness flows from [`SampleRng`], which is ChaCha with 8 rounds
//! seeded from a `u64` (`rand_core`'s PCG32-based seed expansion). Uniform
//! doubles take the top 53 bits of a `u64`; normals use the Box-Muller
//! transform, consuming two uniforms per pair.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SampleRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in `[0, 1)`.
#[inline]
pub fn uniform(rng: &mut SampleRng) -> f64 {
    rng.random::<f64>()
}

/// Uniform in `[lo, hi)`.
#[inline]
pub fn uniform_in(rng: &mut SampleRng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform(rng)
}

/// A pair of independent standard normals.
pub fn normal_pair(rng: &mut SampleRng) -> (f64, f64) {
    // 1 - u lies in (0, 1], so the log is finite
    let u1 = 1.0 - uniform(rng);
    let u2 = uniform(rng);
    let radius = (-2.0 * u1.ln()).sqrt();
    let angle = std::f64::consts::TAU * u2;
    (radius * angle.cos(), radius * angle.sin())
}

/// Fills `out` with independent standard normals.
pub fn fill_normal(rng: &mut SampleRng, out: &mut [f64]) {
    let mut chunks = out.chunks_mut(2);
    for chunk in &mut chunks {
        let (a, b) = normal_pair(rng);
        chunk[0] = a;
        if chunk.len() > 1 {
            chunk[1] = b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = seeded(42);
        let mut b = seeded(42);
        for _ in 0..100 {
            assert_eq!(uniform(&mut a).to_bits(), uniform(&mut b).to_bits());
        }
        assert_ne!(uniform(&mut seeded(1)), uniform(&mut seeded(2)));
    }

    #[test]
    fn normal_moments() {
        let mut rng = seeded(9);
        let n = 200_000;
        let mut buf = vec![0.0; n];
        fill_normal(&mut rng, &mut buf);
        let mean = buf.iter().sum::<f64>() / n as f64;
        let var = buf.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 0.01);
        assert!((var - 1.0).abs() < 0.02);
    }

    #[test]
    fn uniform_range() {
        let mut rng = seeded(0);
        for _ in 0..1000 {
            let v = uniform_in(&mut rng, -2.0, 3.0);
            assert!((-2.0..3.0).contains(&v));
        }
    }
}
