//! Seeded, splittable randomness.
//!
//! A [`RandomSource`] is just a 64-bit seed. Every consumer asks for a
//! numbered stream, so parallel Monte Carlo workers draw from independent
//! ChaCha streams and results do not depend on scheduling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomSource {
    seed: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Generator for sub-stream `index`.
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    /// A child source whose streams are disjoint from the parent's for all
    /// practical purposes. Used to give each trial of an experiment its own
    /// family of streams.
    pub fn derive(&self, label: u64) -> Self {
        let mut rng = self.stream(u64::MAX - label);
        Self { seed: rng.random() }
    }
}

/// Standard complex Gaussian: real and imaginary parts i.i.d. `N(0, 1/2)`,
/// so that `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let src = RandomSource::new(42);
        let a: Vec<u64> = (0..8).map(|_| src.stream(3).random()).collect();
        let mut r = src.stream(3);
        let first: u64 = r.random();
        assert!(a.iter().all(|&x| x == first));
        let mut s1 = src.stream(1);
        let mut s2 = src.stream(2);
        assert_ne!(s1.random::<u64>(), s2.random::<u64>());
    }

    #[test]
    fn derived_sources_differ() {
        let src = RandomSource::new(7);
        assert_ne!(src.derive(0), src.derive(1));
        assert_eq!(src.derive(5), src.derive(5));
    }

    #[test]
    fn complex_gaussian_has_unit_second_moment() {
        let mut rng = RandomSource::new(1).stream(0);
        let n = 200_000;
        let s: f64 = (0..n).map(|_| complex_gaussian(&mut rng).norm_sqr()).sum();
        assert!((s / n as f64 - 1.0).abs() < 0.01);
    }
}
