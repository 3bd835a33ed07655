//! Seeded, counter-based randomness. Every sampler in the crate draws from
//! a ChaCha stream cipher generator (`ChaCha8Rng`); per-sample substreams
//! are derived as `seed ⊕ index`, so sample `i` is the same no matter how
//! many samples run before it or on which thread.

use crate::Float;
use alloc::vec::Vec;
use core::f64::consts::PI;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The generator behind every randomized routine in this crate.
pub type Stream = ChaCha8Rng;

/// Root stream for a seed.
pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Substream for one sample: the ChaCha stream counter is set to the
/// index, so substreams are independent and order-free no matter how the
/// seed and index ranges overlap.
pub fn substream(seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Standard Gaussian via Box–Muller.
pub fn gaussian(rng: &mut Stream) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2: f64 = rng.gen();
    Float::sqrt(-2.0 * Float::ln(u1)) * Float::cos(2.0 * PI * u2)
}

pub fn gaussian_vec(rng: &mut Stream, n: usize) -> Vec<f64> {
    (0..n).map(|_| gaussian(rng)).collect()
}

/// Uniform point on the unit sphere S^{n−1}: normalized Gaussian vector,
/// redrawn while the pre-normalization norm is below 1e−8.
pub fn unit_sphere_point(rng: &mut Stream, n: usize) -> Vec<f64> {
    loop {
        let g = gaussian_vec(rng, n);
        let norm = crate::numerics::norm(&g);
        if norm >= 1e-8 {
            return crate::numerics::scaled(&g, 1.0 / norm);
        }
    }
}

/// Uniform point in the closed unit ball: sphere direction scaled by
/// U^{1/n}.
pub fn unit_ball_point(rng: &mut Stream, n: usize) -> Vec<f64> {
    let dir = unit_sphere_point(rng, n);
    let u: f64 = rng.gen();
    let r = Float::powf(u, 1.0 / n as f64);
    crate::numerics::scaled(&dir, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substreams_are_deterministic() {
        let a: Vec<f64> = gaussian_vec(&mut substream(42, 3), 8);
        let b: Vec<f64> = gaussian_vec(&mut substream(42, 3), 8);
        assert_eq!(a, b);
        let c: Vec<f64> = gaussian_vec(&mut substream(42, 4), 8);
        assert_ne!(a, c);
    }

    #[test]
    fn sphere_points_are_unit() {
        let mut rng = stream(1);
        for _ in 0..50 {
            let p = unit_sphere_point(&mut rng, 4);
            assert!((crate::numerics::norm(&p) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ball_points_inside() {
        let mut rng = stream(2);
        for _ in 0..50 {
            let p = unit_ball_point(&mut rng, 3);
            assert!(crate::numerics::norm(&p) <= 1.0 + 1e-12);
        }
    }
}
