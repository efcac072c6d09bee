//! Closed-form MSE of the channel estimators, their high-SNR limits, the
//! single-user worst-pilot bounds and the MSE-optimal SNR of those bounds.

use std::f64::consts::{FRAC_2_PI, PI};

use super::PilotCorrelation;
use crate::error::{arg_err, Error, Result};
use crate::pilots::PilotMatrix;
use crate::quant::omega;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MseKind {
    Blm,
    Sls,
    SlsOpt,
}

fn require_closed_form(p: &PilotMatrix) -> Result<()> {
    if p.circulant_gram() || p.k() == 1 {
        Ok(())
    } else {
        Err(Error::Precondition(
            "closed-form Bussgang MSE requires a circulant pilot Gram matrix".into(),
        ))
    }
}

fn blm_from_deltas(rho_eff: f64, k: usize, tau: usize, deltas: &[f64]) -> f64 {
    let t = tau as f64;
    let inv: f64 = deltas.iter().map(|d| 1.0 / (t + d)).sum::<f64>() / k as f64;
    1.0 - FRAC_2_PI * rho_eff * t * t * inv
}

/// MSE of the Bussgang LMMSE estimator.
///
/// Needs a circulant `P P^H`. For a single user the value is the MSE of the
/// simplified (optimal scaled LS) estimator for any pilot.
pub fn mse_blm_closed(p: &PilotMatrix, rho: f64) -> Result<f64> {
    require_closed_form(p)?;
    let corr = PilotCorrelation::new(p, rho)?;
    let k = p.k();
    Ok(blm_from_deltas(
        rho / (rho * k as f64 + 1.0),
        k,
        p.tau(),
        &corr.delta_k,
    ))
}

fn sls_general(rho: f64, k: usize, tau: usize, delta: f64, psi: f64) -> f64 {
    let (t, kk) = (tau as f64, k as f64);
    1.0 + (rho * kk + 1.0) * psi * (t + delta) - 2.0 * (FRAC_2_PI * rho * psi).sqrt() * t
}

/// MSE of `sqrt(psi) R_p P` for an arbitrary `psi`; defaults to the common
/// factor that ignores the distortion correlation.
pub fn mse_sls_closed(p: &PilotMatrix, rho: f64, psi: Option<f64>) -> Result<f64> {
    let corr = PilotCorrelation::new(p, rho)?;
    let (tau, k) = (p.tau(), p.k());
    let psi = match psi {
        Some(x) if !(x > 0.0 && x.is_finite()) => {
            return arg_err(format!("scaling factor must be positive, got {x}"))
        }
        Some(x) => x,
        None => super::ScalingFactors::new(&corr, tau, k, rho).psi_mol,
    };
    Ok(sls_general(rho, k, tau, corr.delta, psi))
}

/// The expanded form of the scaled-LS MSE at the default common factor.
pub fn mse_sls_mol(p: &PilotMatrix, rho: f64) -> Result<f64> {
    let corr = PilotCorrelation::new(p, rho)?;
    let (t, kk) = (p.tau() as f64, p.k() as f64);
    let den = FRAC_2_PI * rho * (t - kk) + rho * kk + 1.0;
    Ok(1.0
        - FRAC_2_PI * rho / (den * den)
            * (2.0 * FRAC_2_PI * rho * t * (t - kk) + (rho * kk + 1.0) * (t - corr.delta)))
}

/// MSE of scaled LS with the MSE-minimizing common factor.
pub fn mse_sls_opt(p: &PilotMatrix, rho: f64) -> Result<f64> {
    let corr = PilotCorrelation::new(p, rho)?;
    let (t, kk) = (p.tau() as f64, p.k() as f64);
    Ok(1.0 - FRAC_2_PI * rho * t * t / ((rho * kk + 1.0) * (t + corr.delta)))
}

/// The common value of every estimator's MSE when `tau = K`.
pub fn mse_tau_eq_k(rho: f64, k: usize) -> f64 {
    let rk = rho * k as f64;
    1.0 - FRAC_2_PI * rk / (rk + 1.0)
}

/// `rho -> inf` limits of the three MSE expressions.
pub fn mse_asymptotic(kind: MseKind, p: &PilotMatrix) -> Result<f64> {
    let (tau, k) = (p.tau(), p.k());
    let (t, kk) = (tau as f64, k as f64);
    let bar = super::delta_bar_k(p)?;
    let bar_mean = bar.iter().sum::<f64>() / kk;
    Ok(match kind {
        MseKind::Blm => {
            require_closed_form(p)?;
            let inv: f64 = bar.iter().map(|d| 1.0 / (t + d)).sum();
            1.0 - FRAC_2_PI * t * t / (kk * kk) * inv
        }
        MseKind::Sls => {
            let den = FRAC_2_PI * (t - kk) + kk;
            1.0 - FRAC_2_PI / (den * den) * (2.0 * FRAC_2_PI * t * (t - kk) + kk * (t - bar_mean))
        }
        MseKind::SlsOpt => 1.0 - FRAC_2_PI * t * t / (kk * (t + bar_mean)),
    })
}

/// Single-user MSE with the all-ones pilot, an upper bound over pilot choices.
/// `SlsOpt` coincides with `Blm` for one user.
pub fn mse_bound_ones(kind: MseKind, rho: f64, tau: usize) -> Result<f64> {
    check_bound_args(rho, tau)?;
    let t = tau as f64;
    let om = omega(rho / (rho + 1.0))?;
    Ok(match kind {
        MseKind::Blm | MseKind::SlsOpt => {
            1.0 - FRAC_2_PI * rho * t / ((rho + 1.0) * (1.0 + (t - 1.0) * om))
        }
        MseKind::Sls => {
            let den = FRAC_2_PI * rho * (t - 1.0) + rho + 1.0;
            1.0 - FRAC_2_PI * rho * t / (den * den)
                * (2.0 * FRAC_2_PI * rho * (t - 1.0) + (rho + 1.0) * (1.0 - (t - 1.0) * om))
        }
    })
}

pub fn mse_bound_ones_lim_rho(kind: MseKind, tau: usize) -> Result<f64> {
    if tau == 0 {
        return arg_err("pilot length must be at least 1");
    }
    let t = tau as f64;
    Ok(match kind {
        MseKind::Blm | MseKind::SlsOpt => 1.0 - FRAC_2_PI,
        MseKind::Sls => {
            let den = FRAC_2_PI * (t - 1.0) + 1.0;
            1.0 - FRAC_2_PI * t / (den * den) * (2.0 * FRAC_2_PI * (t - 1.0) - t + 2.0)
        }
    })
}

pub fn mse_bound_ones_lim_tau(kind: MseKind, rho: f64) -> Result<f64> {
    check_bound_args(rho, 1)?;
    let om = omega(rho / (rho + 1.0))?;
    Ok(match kind {
        MseKind::Blm | MseKind::SlsOpt => 1.0 - FRAC_2_PI * rho / ((rho + 1.0) * om),
        MseKind::Sls => PI / 2.0 * (rho + 1.0) / rho * om - 1.0,
    })
}

fn check_bound_args(rho: f64, tau: usize) -> Result<()> {
    if !(rho > 0.0 && rho.is_finite()) {
        return arg_err(format!("SNR must be positive, got {rho}"));
    }
    if tau == 0 {
        return arg_err("pilot length must be at least 1");
    }
    Ok(())
}

/// `(2/pi) rho / sqrt(1 + 2 rho) - Omega(rho / (rho + 1)) - 1 / (tau - 1)`.
pub fn rho_star_residual(rho: f64, tau: usize) -> f64 {
    let lhs = FRAC_2_PI * rho / (1.0 + 2.0 * rho).sqrt() - FRAC_2_PI * (rho / (rho + 1.0)).asin();
    lhs - 1.0 / (tau as f64 - 1.0)
}

const RHO_STAR_BRACKET: (f64, f64) = (1e-6, 1e6);

/// SNR minimizing the single-user all-ones BLM bound, by bisection on the
/// stationarity condition. The left-hand side increases with `rho`.
pub fn solve_rho_star(tau: usize) -> Result<f64> {
    if tau < 2 {
        return arg_err(format!("optimal pilot SNR needs tau >= 2, got {tau}"));
    }
    let (mut lo, mut hi) = RHO_STAR_BRACKET;
    let (f_lo, f_hi) = (rho_star_residual(lo, tau), rho_star_residual(hi, tau));
    if f_lo > 0.0 || f_hi < 0.0 {
        return Err(Error::Numerical(format!(
            "optimal SNR for tau = {tau} not bracketed by [{lo:e}, {hi:e}]"
        )));
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        let f = rho_star_residual(mid, tau);
        if f.abs() < 1e-12 || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if f < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pilots::{dft_pilots, ones_pilot, pstar_pilot};

    #[test]
    fn single_user_tau_one() {
        // 1 - (2/pi) rho/(rho+1) at rho = 1 is 1 - 1/pi.
        let p = dft_pilots(1, 1).unwrap();
        let want = 1.0 - 1.0 / PI;
        assert!((mse_blm_closed(&p, 1.0).unwrap() - want).abs() < 1e-15);
        assert!((mse_sls_closed(&p, 1.0, None).unwrap() - want).abs() < 1e-15);
        assert!((mse_sls_opt(&p, 1.0).unwrap() - want).abs() < 1e-15);
        assert!((mse_bound_ones(MseKind::Sls, 1.0, 1).unwrap() - want).abs() < 1e-15);
        assert!((mse_bound_ones(MseKind::Blm, 1.0, 1).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn tau_equals_k_collapse() {
        for (k, rho) in [(1, 0.1), (4, 10.0), (8, 1000.0), (3, 0.5)] {
            let p = dft_pilots(k, k).unwrap();
            let want = mse_tau_eq_k(rho, k);
            for got in [
                mse_blm_closed(&p, rho).unwrap(),
                mse_sls_closed(&p, rho, None).unwrap(),
                mse_sls_mol(&p, rho).unwrap(),
                mse_sls_opt(&p, rho).unwrap(),
            ] {
                assert!((got - want).abs() <= 1e-15, "{got} vs {want}");
            }
        }
        assert!((mse_tau_eq_k(1e6, 1) - (1.0 - FRAC_2_PI)).abs() < 1e-5);
    }

    #[test]
    fn two_sls_routes_agree() {
        for (tau, k, rho) in [(32, 4, 10.0), (128, 8, 0.1), (32, 1, 1000.0)] {
            let p = dft_pilots(tau, k).unwrap();
            let a = mse_sls_closed(&p, rho, None).unwrap();
            let b = mse_sls_mol(&p, rho).unwrap();
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn optimal_factor_minimizes_sls() {
        let p = dft_pilots(32, 4).unwrap();
        let rho = 10.0;
        let s = crate::chest::ScalingFactors::from_pilot(&p, rho).unwrap();
        let best = mse_sls_closed(&p, rho, Some(s.psi_opt)).unwrap();
        assert!((best - mse_sls_opt(&p, rho).unwrap()).abs() < 1e-13);
        for f in [0.5, 0.9, 0.99, 1.01, 1.1, 2.0] {
            assert!(mse_sls_closed(&p, rho, Some(s.psi_opt * f)).unwrap() > best);
        }
        assert!(mse_sls_closed(&p, rho, Some(-1.0)).is_err());
    }

    #[test]
    fn single_user_blm_equals_sls_opt() {
        for p in [
            pstar_pilot(16).unwrap(),
            ones_pilot(8).unwrap(),
            dft_pilots(32, 1).unwrap(),
        ] {
            for rho in [0.1, 1.0, 100.0] {
                assert!(
                    (mse_blm_closed(&p, rho).unwrap() - mse_sls_opt(&p, rho).unwrap()).abs()
                        < 1e-15
                );
            }
        }
    }

    #[test]
    fn bounds_match_general_formulas_with_ones_pilot() {
        for tau in [2, 7, 32] {
            let p = ones_pilot(tau).unwrap();
            for rho in [0.05, 1.0, 30.0] {
                let blm = mse_blm_closed(&p, rho).unwrap();
                let sls = mse_sls_closed(&p, rho, None).unwrap();
                assert!((mse_bound_ones(MseKind::Blm, rho, tau).unwrap() - blm).abs() < 1e-12);
                assert!((mse_bound_ones(MseKind::Sls, rho, tau).unwrap() - sls).abs() < 1e-12);
            }
            let lim = mse_asymptotic(MseKind::Sls, &p).unwrap();
            assert!((mse_bound_ones_lim_rho(MseKind::Sls, tau).unwrap() - lim).abs() < 1e-12);
            let lim = mse_asymptotic(MseKind::Blm, &p).unwrap();
            assert!((mse_bound_ones_lim_rho(MseKind::Blm, tau).unwrap() - lim).abs() < 1e-12);
        }
    }

    #[test]
    fn bound_limits_are_limits() {
        for tau in [4, 32] {
            let far = mse_bound_ones(MseKind::Blm, 1e12, tau).unwrap();
            assert!((far - (1.0 - FRAC_2_PI)).abs() < 1e-4);
            let far = mse_bound_ones(MseKind::Sls, 1e12, tau).unwrap();
            assert!((far - mse_bound_ones_lim_rho(MseKind::Sls, tau).unwrap()).abs() < 1e-4);
        }
        for rho in [0.1, 2.0] {
            for kind in [MseKind::Blm, MseKind::Sls] {
                let far = mse_bound_ones(kind, rho, 10_000_000).unwrap();
                assert!((far - mse_bound_ones_lim_tau(kind, rho).unwrap()).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn bound_dominates_best_pilot() {
        let tau = 32;
        let bound = mse_bound_ones(MseKind::Blm, 2.0, tau).unwrap();
        assert!(bound >= mse_blm_closed(&pstar_pilot(tau).unwrap(), 2.0).unwrap());
    }

    #[test]
    fn asymptotics() {
        let p = dft_pilots(4, 4).unwrap();
        assert!((mse_asymptotic(MseKind::Blm, &p).unwrap() - (1.0 - FRAC_2_PI)).abs() < 1e-14);
        let p = dft_pilots(32, 4).unwrap();
        let lim = mse_asymptotic(MseKind::Blm, &p).unwrap();
        assert!((mse_blm_closed(&p, 1e6).unwrap() - lim).abs() < 1e-4);
        let p = dft_pilots(128, 8).unwrap();
        assert!(
            mse_asymptotic(MseKind::Sls, &p).unwrap()
                > mse_asymptotic(MseKind::SlsOpt, &p).unwrap()
        );
    }

    #[test]
    fn closed_form_requires_circulant_gram() {
        let one = num_complex::Complex64::new(1.0, 0.0);
        let walsh = PilotMatrix::from_matrix(
            crate::cmatrix::CMatrix::from_vec(4, 2, vec![one, one, one, one, one, -one, one, -one])
                .unwrap(),
        )
        .unwrap();
        assert!(matches!(
            mse_blm_closed(&walsh, 1.0),
            Err(Error::Precondition(_))
        ));
        assert!(mse_sls_opt(&walsh, 1.0).is_ok());
    }

    /// Grid scan at 1e-4 spacing in log10(rho): the sign change of the
    /// residual brackets the bisection root.
    #[test]
    fn rho_star_matches_grid_scan() {
        let tau = 33;
        let root = solve_rho_star(tau).unwrap();
        let mut prev = (-6.0f64, rho_star_residual(1e-6, tau));
        let mut found = None;
        let mut x = -6.0;
        while x < 6.0 {
            x += 1e-4;
            let f = rho_star_residual(10f64.powf(x), tau);
            if prev.1 < 0.0 && f >= 0.0 {
                found = Some((10f64.powf(prev.0), 10f64.powf(x)));
                break;
            }
            prev = (x, f);
        }
        let (lo, hi) = found.expect("sign change");
        assert!(lo <= root && root <= hi, "{lo} {root} {hi}");
        assert!(rho_star_residual(root, tau).abs() < 1e-10);
    }

    #[test]
    fn rho_star_minimizes_bound() {
        // Golden-section minimum of the bound in log rho agrees with the root.
        let tau = 32;
        let f = |x: f64| mse_bound_ones(MseKind::Blm, 10f64.powf(x), tau).unwrap();
        let (mut a, mut b) = (-4.0f64, 4.0f64);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if f(c) < f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let numeric = 10f64.powf(0.5 * (a + b));
        let root = solve_rho_star(tau).unwrap();
        assert!((numeric / root - 1.0).abs() < 1e-4, "{numeric} vs {root}");
    }

    #[test]
    fn rho_star_decreasing_and_errors() {
        let mut prev = f64::INFINITY;
        for tau in (4..=1024).step_by(4) {
            let r = solve_rho_star(tau).unwrap();
            assert!(r < prev);
            prev = r;
        }
        assert!(solve_rho_star(1).is_err());
        assert!(solve_rho_star(2).is_ok());
    }
}
