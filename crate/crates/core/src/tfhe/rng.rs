use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use crate::torus::Modulus;

/// Seedable generator for keys, masks and noise.
///
/// `fork` derives an independent child stream, so work can be split across
/// threads while staying reproducible from a single seed.
#[derive(Clone, Debug)]
pub struct TfheRng {
    inner: ChaCha20Rng,
}

impl TfheRng {
    pub fn from_seed(seed: u64) -> Self {
        TfheRng {
            inner: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    /// Child generator for stream `index`; does not advance `self`.
    pub fn split(&self, index: u64) -> TfheRng {
        let mut child = self.inner.clone();
        child.set_stream(index.wrapping_add(1));
        child.set_word_pos(0);
        TfheRng { inner: child }
    }

    /// Child generator seeded from the next output of `self`.
    pub fn fork(&mut self) -> TfheRng {
        TfheRng::from_seed(self.inner.next_u64())
    }

    pub fn uniform(&mut self, q: Modulus) -> u64 {
        q.reduce(self.inner.next_u64())
    }

    pub fn binary(&mut self) -> u8 {
        self.inner.random_range(0..2)
    }

    pub fn below(&mut self, bound: u64) -> u64 {
        self.inner.random_range(0..bound)
    }

    /// Rounded Gaussian with standard deviation `std * q`, embedded in `Z_q`.
    pub fn gaussian(&mut self, std: f64, q: Modulus) -> u64 {
        if std == 0.0 {
            return 0;
        }
        let normal = Normal::new(0.0, std * q.as_f64()).expect("finite std");
        q.from_i64(normal.sample(&mut self.inner).round() as i64)
    }
}
