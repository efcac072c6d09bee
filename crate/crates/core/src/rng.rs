//! Reproducible random streams.
//!
//! Every Monte Carlo trial draws from its own stream, keyed by the master
//! seed and the trial index. A stream is a ChaCha8 generator whose key is
//! expanded from the master seed (`seed_from_u64`) and whose 64-bit stream
//! word is the index, so streams never overlap and do not depend on which
//! thread runs the trial.
//!
//! Gaussian samples use the ziggurat `StandardNormal` sampler from
//! `rand_distr`; a CN(0, 1) entry is `(x + j y) / sqrt(2)` with `x`, `y`
//! drawn in that order.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::cmatrix::CMatrix;

#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Standard real Gaussian N(0, 1).
    #[inline]
    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// One CN(0, 1) draw.
    #[inline]
    pub fn cn01(&mut self) -> Complex64 {
        let re = self.normal();
        let im = self.normal();
        Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Matrix with i.i.d. CN(0, 1) entries, filled in row-major order.
pub fn sample_cn01(rng: &mut SeededRng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| rng.cn01())
}

/// Runs `trials` independent trials in parallel and returns their outputs in
/// trial order. Trial `i` receives the stream `(seed, i)`.
pub fn run_trials<T, F>(seed: u64, trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut SeededRng) -> T + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = SeededRng::new(seed, i as u64);
            f(i, &mut rng)
        })
        .collect()
}
