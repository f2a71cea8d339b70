//! Seeded random matrices.
//!
//! All randomness goes through [`MatRng`], a ChaCha8 stream seeded from a
//! `u64`. Normal deviates use the ziggurat sampler of `rand_distr`, so output
//! is reproducible across platforms for a fixed crate version.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{orthonormalize, Mat};

pub struct MatRng {
    inner: ChaCha8Rng,
}

impl MatRng {
    pub fn new(seed: u64) -> Self {
        Self { inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Matrix with i.i.d. standard normal entries, filled column by column.
    pub fn normal(&mut self, rows: usize, cols: usize) -> Mat {
        Mat::from_fn(rows, cols, |_, _| self.inner.sample(StandardNormal))
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.inner.random_range(lo..hi)
    }

    /// Thin orthonormal factor of a normal matrix (R with positive diagonal).
    pub fn orthonormal(&mut self, rows: usize, cols: usize) -> Mat {
        orthonormalize(&self.normal(rows, cols))
    }

    /// Random skew-symmetric matrix.
    pub fn skew(&mut self, k: usize) -> Mat {
        let g = self.normal(k, k);
        (&g - g.transpose()) * 0.5
    }

    /// Random symmetric matrix.
    pub fn symmetric(&mut self, k: usize) -> Mat {
        let g = self.normal(k, k);
        (&g + g.transpose()) * 0.5
    }

    /// Identity plus a normal perturbation of spectral norm roughly 0.6.
    pub fn well_conditioned(&mut self, k: usize) -> Mat {
        let g = self.normal(k, k);
        Mat::identity(k, k) + g * (0.3 / (k as f64).sqrt().max(1.0))
    }
}
