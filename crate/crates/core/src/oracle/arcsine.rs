use std::f64::consts::FRAC_1_SQRT_2;

use super::report::OracleReport;
use crate::error::{arg_err, Result};
use crate::quant::{omega, sgn};
use crate::rng::run_trials;

const BATCH: usize = 1000;

/// `E[sgn(a1^T z) sgn(a2^T z)]` for `z ~ N(0, I / 2)` against
/// `Omega(a1^T a2 / (|a1| |a2|))`.
pub fn arcsine_check(a1: &[f64], a2: &[f64], trials: usize, seed: u64) -> Result<OracleReport> {
    if a1.len() != a2.len() || a1.is_empty() {
        return arg_err(format!(
            "vectors must have equal nonzero length, got {} and {}",
            a1.len(),
            a2.len()
        ));
    }
    let n1 = a1.iter().map(|x| x * x).sum::<f64>().sqrt();
    let n2 = a2.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n1 == 0.0 || n2 == 0.0 {
        return arg_err("arcsine law needs nonzero vectors");
    }
    if trials == 0 {
        return arg_err("trial count must be at least 1");
    }
    let dot: f64 = a1.iter().zip(a2).map(|(x, y)| x * y).sum();
    let closed = omega(dot / (n1 * n2))?;

    // Batches keep the per-stream setup cost negligible at 1e6 trials.
    let batches = trials.div_ceil(BATCH);
    let sums = run_trials(seed, batches, |b, rng| {
        let count = BATCH.min(trials - b * BATCH);
        let mut z = vec![0.0; a1.len()];
        let mut sum = 0i64;
        for _ in 0..count {
            for zi in z.iter_mut() {
                *zi = rng.normal() * FRAC_1_SQRT_2;
            }
            let x1: f64 = a1.iter().zip(&z).map(|(a, z)| a * z).sum();
            let x2: f64 = a2.iter().zip(&z).map(|(a, z)| a * z).sum();
            sum += (sgn(x1) * sgn(x2)) as i64;
        }
        sum
    });
    let mean = sums.iter().sum::<i64>() as f64 / trials as f64;
    let se = ((1.0 - mean * mean).max(0.0) / trials as f64).sqrt();
    Ok(OracleReport::sigma3(
        format!("arcsine law dim={} corr={:.4}", a1.len(), dot / (n1 * n2)),
        closed,
        mean,
        se,
        trials,
    ))
}
