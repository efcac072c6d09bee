//! Mean and variance of the MRC soft estimate of one transmitted symbol.

use std::f64::consts::FRAC_2_PI;

use num_complex::Complex64;

use super::require_single_user;
use crate::chest::{delta_bar_k, delta_k};
use crate::error::{arg_err, Error, Result};
use crate::pilots::PilotMatrix;
use crate::quant::omega;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolStats {
    pub expected: Complex64,
    pub variance: f64,
    /// `variance / |expected|^2`; `None` when the mean is zero.
    pub normalized_variance: Option<f64>,
}

impl SymbolStats {
    fn new(expected: Complex64, variance: f64) -> Self {
        let e2 = expected.norm_sqr();
        Self {
            expected,
            variance,
            normalized_variance: (e2 > 0.0).then(|| variance / e2),
        }
    }
}

/// Precomputed pilot terms for a fixed `(P, rho, M)`.
#[derive(Debug, Clone)]
pub struct SymbolModel {
    pilot: Vec<Complex64>,
    rho: f64,
    m: usize,
    delta: f64,
}

impl SymbolModel {
    pub fn new(p: &PilotMatrix, rho: f64, m: usize) -> Result<Self> {
        require_single_user(p)?;
        if !(rho > 0.0 && rho.is_finite()) {
            return arg_err(format!("SNR must be positive, got {rho}"));
        }
        if m == 0 {
            return arg_err("antenna count must be at least 1");
        }
        Ok(Self {
            pilot: p.column(0),
            rho,
            m,
            delta: delta_k(p, rho)?[0],
        })
    }

    fn tau(&self) -> f64 {
        self.pilot.len() as f64
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn expected(&self, s: Complex64) -> Result<Complex64> {
        let rho = self.rho;
        let norm = ((rho + 1.0) * (rho * s.norm_sqr() + 1.0)).sqrt();
        let sum = omega_sum(&self.pilot, s, |x| rho * x / norm)?;
        let t = self.tau();
        Ok(sum * ((FRAC_2_PI * rho).sqrt() * self.m as f64 * t / (t + self.delta)))
    }

    /// Scale of the variance: its value when the mean vanishes.
    pub fn variance_scale(&self) -> f64 {
        let t = self.tau();
        FRAC_2_PI * self.rho * self.m as f64 * t * t / (t + self.delta)
    }

    pub fn variance(&self, s: Complex64) -> Result<f64> {
        let e = self.expected(s)?;
        clamp_variance(
            self.variance_scale(),
            self.variance_scale() - e.norm_sqr() / self.m as f64,
        )
    }

    pub fn stats(&self, s: Complex64) -> Result<SymbolStats> {
        let e = self.expected(s)?;
        let v = clamp_variance(
            self.variance_scale(),
            self.variance_scale() - e.norm_sqr() / self.m as f64,
        )?;
        Ok(SymbolStats::new(e, v))
    }
}

/// `sum_u p_u^* (Omega(f(Re[p_u s])) + j Omega(f(Im[p_u s])))`.
fn omega_sum(pilot: &[Complex64], s: Complex64, f: impl Fn(f64) -> f64) -> Result<Complex64> {
    pilot.iter().try_fold(Complex64::new(0.0, 0.0), |acc, &p| {
        let ps = p * s;
        Ok(acc + p.conj() * Complex64::new(omega(f(ps.re))?, omega(f(ps.im))?))
    })
}

/// Cancellation can leave a slightly negative variance; anything below
/// `-1e-9` of the scale means the formula was misused.
fn clamp_variance(scale: f64, v: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -1e-9 * scale.abs() {
        Ok(0.0)
    } else {
        Err(Error::Numerical(format!(
            "negative symbol variance {v:e} (scale {scale:e})"
        )))
    }
}

pub fn expected_symbol(s: Complex64, p: &PilotMatrix, rho: f64, m: usize) -> Result<Complex64> {
    SymbolModel::new(p, rho, m)?.expected(s)
}

pub fn variance_symbol(s: Complex64, p: &PilotMatrix, rho: f64, m: usize) -> Result<f64> {
    SymbolModel::new(p, rho, m)?.variance(s)
}

/// High-SNR limits of `E / sqrt(rho)` and `V / rho`. Only the phase of `s`
/// survives, so every symbol on a ray from the origin maps to the same point.
pub fn symbol_stats_asymptotic(s: Complex64, p: &PilotMatrix, m: usize) -> Result<SymbolStats> {
    require_single_user(p)?;
    if s.norm() == 0.0 {
        return arg_err("high-SNR symbol statistics need a nonzero symbol");
    }
    let pilot = p.column(0);
    let t = pilot.len() as f64;
    let delta_bar = delta_bar_k(p)?[0];
    let mag = s.norm();
    let sum = omega_sum(&pilot, s, |x| x / mag)?;
    let e = sum * (FRAC_2_PI.sqrt() * m as f64 * t / (t + delta_bar));
    let scale = FRAC_2_PI * m as f64 * t * t / (t + delta_bar);
    let v = clamp_variance(scale, scale - e.norm_sqr() / m as f64)?;
    Ok(SymbolStats::new(e, v))
}

fn symbol_omegas(s: Complex64, rho: f64) -> Result<(f64, f64)> {
    let norm = ((rho + 1.0) * (rho * s.norm_sqr() + 1.0)).sqrt();
    Ok((omega(rho * s.re / norm)?, omega(rho * s.im / norm)?))
}

fn check_bound_args(s: Complex64, rho: f64, tau: usize, m: usize) -> Result<()> {
    if s.norm() == 0.0 {
        return arg_err("normalized variance is undefined for the zero symbol");
    }
    if !(rho > 0.0 && rho.is_finite()) || tau == 0 || m == 0 {
        return arg_err(format!(
            "invalid bound arguments rho = {rho}, tau = {tau}, M = {m}"
        ));
    }
    Ok(())
}

/// Normalized variance `V / |E|^2` with the all-ones pilot, an upper bound
/// over pilot choices.
pub fn normvar_bound_ones(s: Complex64, rho: f64, tau: usize, m: usize) -> Result<f64> {
    check_bound_args(s, rho, tau, m)?;
    let (a, b) = symbol_omegas(s, rho)?;
    let t = tau as f64;
    let mm = m as f64;
    let om = omega(rho / (rho + 1.0))?;
    Ok((1.0 + (t - 1.0) * om) / (t * mm * (a * a + b * b)) - 1.0 / mm)
}

pub fn normvar_bound_ones_lim_rho(s: Complex64, m: usize) -> Result<f64> {
    check_bound_args(s, 1.0, 1, m)?;
    let mag = s.norm();
    let (a, b) = (omega(s.re / mag)?, omega(s.im / mag)?);
    let mm = m as f64;
    Ok(1.0 / (mm * (a * a + b * b)) - 1.0 / mm)
}

pub fn normvar_bound_ones_lim_tau(s: Complex64, rho: f64, m: usize) -> Result<f64> {
    check_bound_args(s, rho, 1, m)?;
    let (a, b) = symbol_omegas(s, rho)?;
    let mm = m as f64;
    Ok(omega(rho / (rho + 1.0))? / (mm * (a * a + b * b)) - 1.0 / mm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::Constellation;
    use crate::pilots::{dft_pilots, ones_pilot, pstar_pilot};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_symbol() {
        let p = pstar_pilot(8).unwrap();
        let model = SymbolModel::new(&p, 1.0, 16).unwrap();
        assert_eq!(model.expected(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert_eq!(model.variance(c(0.0, 0.0)).unwrap(), model.variance_scale());
        assert!(model
            .stats(c(0.0, 0.0))
            .unwrap()
            .normalized_variance
            .is_none());
        assert!(symbol_stats_asymptotic(c(0.0, 0.0), &p, 16).is_err());
    }

    #[test]
    fn expected_is_odd() {
        let p = pstar_pilot(8).unwrap();
        for s in Constellation::qam16().symbols() {
            let a = expected_symbol(*s, &p, 2.0, 16).unwrap();
            let b = expected_symbol(-*s, &p, 2.0, 16).unwrap();
            assert!((a + b).norm() < 1e-12);
        }
    }

    #[test]
    fn scaling_in_antennas() {
        let p = pstar_pilot(16).unwrap();
        let s = c(1.0, 1.0) / 10f64.sqrt();
        let a = SymbolModel::new(&p, 3.0, 32).unwrap().stats(s).unwrap();
        let b = SymbolModel::new(&p, 3.0, 64).unwrap().stats(s).unwrap();
        assert!((b.variance / a.variance - 2.0).abs() < 1e-12);
        let ratio = b.normalized_variance.unwrap() / a.normalized_variance.unwrap();
        assert!((ratio - 0.5).abs() < 1e-12);
    }

    #[test]
    fn asymptotic_depends_on_phase_only() {
        let p = pstar_pilot(8).unwrap();
        let s = c(1.0, 1.0) / 10f64.sqrt();
        let a = symbol_stats_asymptotic(s, &p, 16).unwrap();
        let b = symbol_stats_asymptotic(s * 3.0, &p, 16).unwrap();
        // One rotated pilot entry lands on the real axis, where asin has
        // infinite slope and amplifies rounding to ~1e-8.
        assert!((a.expected - b.expected).norm() < 1e-7 * a.expected.norm());
        assert!((a.variance - b.variance).abs() < 1e-6 * a.variance);
        // Same-phase magnitudes agree across the four quadrant diagonals.
        let mags: Vec<f64> = [c(1.0, 1.0), c(-1.0, 1.0), c(-1.0, -1.0), c(1.0, -1.0)]
            .iter()
            .map(|&d| symbol_stats_asymptotic(d, &p, 16).unwrap().expected.norm())
            .collect();
        for m in &mags {
            assert!((m - mags[0]).abs() < 1e-9 * mags[0]);
        }
    }

    #[test]
    fn shared_phase_symbols_merge_at_high_snr() {
        let p = pstar_pilot(32).unwrap();
        let rho = crate::config::db_to_linear(40.0);
        let model = SymbolModel::new(&p, rho, 128).unwrap();
        let inner = c(1.0, 1.0) / 10f64.sqrt();
        let a = model.expected(inner).unwrap();
        let b = model.expected(inner * 3.0).unwrap();
        let direction = (a / a.norm() - b / b.norm()).norm();
        assert!(direction < 0.01, "{direction}");
        assert!((a.norm() - b.norm()).abs() / b.norm() < 0.02);
        let low = SymbolModel::new(&p, 1.0, 128).unwrap();
        let gap_low =
            (low.expected(inner).unwrap().norm() / low.expected(inner * 3.0).unwrap().norm() - 1.0)
                .abs();
        assert!(gap_low > (a.norm() / b.norm() - 1.0).abs());
    }

    #[test]
    fn finite_snr_approaches_limit() {
        let p = pstar_pilot(8).unwrap();
        let s = c(3.0, 1.0) / 10f64.sqrt();
        let rho = 1e6;
        let lim = symbol_stats_asymptotic(s, &p, 16).unwrap();
        let e = expected_symbol(s, &p, rho, 16).unwrap() / rho.sqrt();
        assert!((e - lim.expected).norm() < 1e-3);
    }

    #[test]
    fn ones_bound_matches_general_formula() {
        for tau in [1, 4, 32] {
            let p = ones_pilot(tau).unwrap();
            for rho in [0.1, 1.0, 10.0, 1000.0] {
                for s in Constellation::qam16().symbols() {
                    let st = SymbolModel::new(&p, rho, 128).unwrap().stats(*s).unwrap();
                    let bound = normvar_bound_ones(*s, rho, tau, 128).unwrap();
                    let got = st.normalized_variance.unwrap();
                    assert!(
                        (bound - got).abs() < 1e-10 * got.max(1.0),
                        "{bound} vs {got}"
                    );
                }
            }
        }
    }

    #[test]
    fn ones_bound_limits() {
        let s = c(3.0, 1.0) / 10f64.sqrt();
        let a = normvar_bound_ones_lim_rho(s, 128).unwrap();
        for tau in [2, 8, 64] {
            assert!((normvar_bound_ones(s, 1e12, tau, 128).unwrap() - a).abs() < 1e-4);
        }
        let b = normvar_bound_ones_lim_tau(s, 3.0, 128).unwrap();
        assert!((normvar_bound_ones(s, 3.0, 10_000_000, 128).unwrap() - b).abs() < 1e-6);
        // Diverges as the SNR vanishes.
        let one = c(1.0, 0.0);
        let small = normvar_bound_ones(one, 1e-6, 32, 128).unwrap();
        assert!(small > 1e3);
        assert!(normvar_bound_ones(one, 1e-9, 32, 128).unwrap() > small);
    }

    #[test]
    fn bound_dominates_best_pilot() {
        // Diagonal symbols are dominated everywhere. For the (3 + j) family the
        // all-ones pilot yields a slightly larger |E| at low SNR, which can
        // outweigh its larger Delta by up to ~1e-3 relative at tau = 2.
        let m = 128;
        for tau in [2, 4, 8, 16, 32, 64, 128] {
            let best = pstar_pilot(tau).unwrap();
            for db in [-20.0, -10.0, -5.0, 0.0, 3.0, 5.0, 10.0, 20.0, 30.0, 40.0] {
                let rho = crate::config::db_to_linear(db);
                let model = SymbolModel::new(&best, rho, m).unwrap();
                for s in Constellation::qam16().symbols() {
                    let nv = model.stats(*s).unwrap().normalized_variance.unwrap();
                    let b = normvar_bound_ones(*s, rho, tau, m).unwrap();
                    let slack = if s.re.abs() == s.im.abs() || db >= 3.0 {
                        1e-12
                    } else {
                        2e-3
                    };
                    assert!(
                        b >= nv * (1.0 - slack),
                        "tau {tau} db {db} s {s}: {b} < {nv}"
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_multi_user() {
        let p = dft_pilots(8, 2).unwrap();
        assert!(expected_symbol(c(1.0, 0.0), &p, 1.0, 4).is_err());
    }

    #[test]
    fn variance_clamp() {
        assert_eq!(clamp_variance(1.0, -1e-12).unwrap(), 0.0);
        assert!(clamp_variance(1.0, -1e-6).is_err());
    }
}
