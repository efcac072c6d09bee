//! The default validation suite: every closed form against an oracle, plus
//! the structural properties of the model.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::arcsine::arcsine_check;
use super::limits::{
    amplitude_transfer, amplitude_transfer_check, phase_angle_check, phase_recovery_check,
    quarter_shift_check,
};
use super::mse::{empirical_mse, empirical_mse_many};
use super::report::{real, OracleReport, Tolerance};
use super::stats::SampleMoments;
use super::symbols::{empirical_normvar, empirical_symbol_stats, sample_xhat};
use crate::chest::{
    mse_asymptotic, mse_blm_closed, mse_bound_ones, mse_bound_ones_lim_rho, mse_bound_ones_lim_tau,
    mse_sls_mol, mse_sls_opt, mse_tau_eq_k, rho_star_residual, solve_rho_star, EstimatorKind,
    LinearEstimator, MseKind, ScalingFactors,
};
use crate::config::{db_to_linear, SystemConfig};
use crate::detect::{
    normvar_bound_ones, normvar_bound_ones_lim_rho, normvar_bound_ones_lim_tau,
    symbol_stats_asymptotic, SymbolModel,
};
use crate::error::Result;
use crate::pilots::{dft_pilots, ones_pilot, pstar_pilot};
use crate::rng::SeededRng;

struct Seeds(u64);

impl Seeds {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        self.0
    }
}

/// Runs the full suite with `trials` Monte Carlo draws per check (ten times
/// as many for the arcsine law).
pub fn validation_suite(trials: usize, seed: u64) -> Result<Vec<OracleReport>> {
    let mut seeds = Seeds(seed);
    let mut out = Vec::new();
    mse_reports(trials, &mut seeds, &mut out)?;
    symbol_reports(trials, &mut seeds, &mut out)?;
    law_reports(trials, &mut seeds, &mut out)?;
    property_reports(&mut seeds, &mut out)?;
    Ok(out)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mse_reports(trials: usize, seeds: &mut Seeds, out: &mut Vec<OracleReport>) -> Result<()> {
    let all = EstimatorKind::STANDARD;

    let p = dft_pilots(1, 1)?;
    out.extend(empirical_mse_many(
        &all,
        &SystemConfig::new(1, 1, 1, 1.0, trials, seeds.next())?,
        &p,
    )?);

    let p = dft_pilots(32, 4)?;
    let cfg = SystemConfig::new(4, 4, 32, 10.0, trials, seeds.next())?;
    let psi = ScalingFactors::from_pilot(&p, 10.0)?.psi_opt;
    let mut kinds = all.to_vec();
    kinds.push(EstimatorKind::SlsCustom(0.5 * psi));
    out.extend(empirical_mse_many(&kinds, &cfg, &p)?);

    let p = pstar_pilot(8)?;
    let kinds = [
        EstimatorKind::BlmSimplified,
        EstimatorKind::SlsMol,
        EstimatorKind::SlsOpt,
    ];
    out.extend(empirical_mse_many(
        &kinds,
        &SystemConfig::new(4, 1, 8, 1.0, trials, seeds.next())?,
        &p,
    )?);

    // Worst-pilot bounds are the closed forms at the all-ones pilot.
    let tau = 16;
    let rho = db_to_linear(3.0);
    let cfg = SystemConfig::new(2, 1, tau, rho, trials, seeds.next())?;
    let ones = ones_pilot(tau)?;
    for (kind, mk) in [
        (EstimatorKind::SlsOpt, MseKind::Blm),
        (EstimatorKind::SlsMol, MseKind::Sls),
    ] {
        let r = empirical_mse(kind, &cfg, &ones)?;
        out.push(OracleReport::sigma3(
            format!("mse bound ones {:?} tau={tau} rho=3dB", mk),
            mse_bound_ones(mk, rho, tau)?,
            r.empirical.re,
            r.std_error,
            r.n_trials,
        ));
    }

    // High-SNR limits, simulated far enough out that the finite-SNR gap is
    // below the Monte Carlo resolution.
    let rho = 1e8;
    let p = dft_pilots(32, 4)?;
    let cfg = SystemConfig::new(4, 4, 32, rho, trials, seeds.next())?;
    let kinds = [
        EstimatorKind::BlmFull,
        EstimatorKind::SlsMol,
        EstimatorKind::SlsOpt,
    ];
    let rs = empirical_mse_many(&kinds, &cfg, &p)?;
    for (r, mk) in rs.iter().zip([MseKind::Blm, MseKind::Sls, MseKind::SlsOpt]) {
        out.push(OracleReport::sigma3(
            format!("mse high-snr limit {:?} K=4 tau=32", mk),
            mse_asymptotic(mk, &p)?,
            r.empirical.re,
            r.std_error,
            r.n_trials,
        ));
    }
    Ok(())
}

fn symbol_reports(trials: usize, seeds: &mut Seeds, out: &mut Vec<OracleReport>) -> Result<()> {
    let r10 = 10f64.sqrt();
    let cases = [
        (16, 8, 1.0, c(1.0, 1.0) / r10),
        (16, 8, 1.0, c(3.0, 3.0) / r10),
        (64, 32, 10.0, c(1.0, 3.0) / r10),
        (16, 8, 1.0, c(0.0, 0.0)),
    ];
    for (m, tau, rho, s) in cases {
        let cfg = SystemConfig::new(m, 1, tau, rho, trials, seeds.next())?;
        let (mean, var) = empirical_symbol_stats(s, &cfg, &pstar_pilot(tau)?)?;
        out.push(mean);
        out.push(var);
    }

    // High-SNR limit of E / sqrt(rho) and V / rho.
    let (m, tau, rho) = (16, 8, 1e8);
    let s = c(3.0, 1.0) / r10;
    let p = pstar_pilot(tau)?;
    let cfg = SystemConfig::new(m, 1, tau, rho, trials, seeds.next())?;
    let xs: Vec<Complex64> = sample_xhat(s, &cfg, &p)?
        .into_iter()
        .map(|x| x / rho.sqrt())
        .collect();
    let mom = SampleMoments::of(&xs);
    let lim = symbol_stats_asymptotic(s, &p, m)?;
    out.push(OracleReport::new(
        "symbol mean high-snr limit M=16 tau=8",
        lim.expected,
        mom.mean,
        mom.se_mean_total(),
        trials,
        Tolerance::Sigma(3.0),
    ));
    out.push(OracleReport::new(
        "symbol variance high-snr limit M=16 tau=8",
        real(lim.variance),
        real(mom.variance),
        mom.se_variance(),
        trials,
        Tolerance::Relative(0.05),
    ));

    // Normalized-variance bound is the normalized variance at the all-ones pilot.
    let (m, tau, rho) = (32, 16, 10.0);
    let s = c(1.0, 1.0) / r10;
    let cfg = SystemConfig::new(m, 1, tau, rho, trials, seeds.next())?;
    out.push(empirical_normvar(
        "normvar bound ones M=32 tau=16 rho=10dB",
        normvar_bound_ones(s, rho, tau, m)?,
        s,
        &cfg,
        &ones_pilot(tau)?,
    )?);
    let rho = 1e8;
    let cfg = SystemConfig::new(m, 1, tau, rho, trials, seeds.next())?;
    out.push(empirical_normvar(
        "normvar bound ones high-snr limit M=32 tau=16",
        normvar_bound_ones_lim_rho(s, m)?,
        s,
        &cfg,
        &ones_pilot(tau)?,
    )?);
    let lim_tau = normvar_bound_ones_lim_tau(s, 10.0, m)?;
    let far = normvar_bound_ones(s, 10.0, 10_000_000, m)?;
    out.push(OracleReport::new(
        "normvar bound ones long-pilot limit M=32 rho=10dB",
        real(lim_tau),
        real(far),
        0.0,
        0,
        Tolerance::Relative(1e-5),
    ));
    Ok(())
}

fn law_reports(trials: usize, seeds: &mut Seeds, out: &mut Vec<OracleReport>) -> Result<()> {
    let arcsine_trials = trials.saturating_mul(10);
    let a = [0.3, -1.2, 0.8, 2.0, -0.5, 1.1];
    out.push(arcsine_check(&a, &a, arcsine_trials, seeds.next())?);
    out.push(arcsine_check(
        &[1.0, 0.0, 2.0],
        &[0.0, 3.0, 0.0],
        arcsine_trials,
        seeds.next(),
    )?);
    let mut rng = SeededRng::new(seeds.next(), 0);
    let a1: Vec<f64> = (0..6).map(|_| rng.normal()).collect();
    let a2: Vec<f64> = a1.iter().map(|x| 0.6 * x + 0.8 * rng.normal()).collect();
    out.push(arcsine_check(&a1, &a2, arcsine_trials, seeds.next())?);

    out.push(phase_recovery_check(
        Complex64::from_polar(1.0, PI / 7.0),
        1e4,
        4096,
        seeds.next(),
    )?);
    out.push(phase_recovery_check(c(0.8, 0.0), 1e4, 4096, seeds.next())?);
    out.push(phase_angle_check(
        Complex64::from_polar(1.0, PI / 7.0),
        4096,
    )?);
    out.push(quarter_shift_check(
        Complex64::from_polar(1.0, PI / 7.0),
        4096,
    )?);

    let tau = trials.max(1);
    out.push(amplitude_transfer_check(
        c(1.0, 0.25),
        4.0,
        tau,
        seeds.next(),
    )?);
    out.push(amplitude_transfer_check(
        c(0.0, 0.0),
        4.0,
        tau,
        seeds.next(),
    )?);
    Ok(())
}

fn property_reports(seeds: &mut Seeds, out: &mut Vec<OracleReport>) -> Result<()> {
    let grid_db: Vec<f64> = (-20..=60).map(|d| d as f64).collect();

    // Full and simplified Bussgang estimators coincide for circulant pilots.
    let mut worst: f64 = 0.0;
    for (tau, k) in [(8, 2), (32, 4), (128, 8)] {
        let p = dft_pilots(tau, k)?;
        for db in [-10.0, 0.0, 10.0, 30.0] {
            let rho = db_to_linear(db);
            let full = LinearEstimator::new(EstimatorKind::BlmFull, &p, rho)?;
            let simple = LinearEstimator::new(EstimatorKind::BlmSimplified, &p, rho)?;
            let diff = full.weights().max_abs_diff(simple.weights())?;
            worst = worst.max(diff / simple.weights().frobenius_norm_sqr().sqrt());
        }
    }
    out.push(OracleReport::property(
        "full equals simplified Bussgang weights",
        worst,
        0.0,
        worst < 1e-10,
    ));

    // MSE ordering BLM <= optimal scaled LS <= default scaled LS.
    let mut ordered = true;
    let mut slack: f64 = 0.0;
    for (tau, k) in [(32, 1), (32, 4), (128, 8)] {
        let p = dft_pilots(tau, k)?;
        for &db in &grid_db {
            let rho = db_to_linear(db);
            let (b, o, s) = (
                mse_blm_closed(&p, rho)?,
                mse_sls_opt(&p, rho)?,
                mse_sls_mol(&p, rho)?,
            );
            ordered &= b <= o + 1e-14 && o <= s + 1e-14;
            slack = slack.max(b - o).max(o - s);
        }
    }
    out.push(OracleReport::property(
        "mse ordering blm <= sls-opt <= sls",
        slack,
        0.0,
        ordered,
    ));

    // The all-ones pilot bounds the best pilot from above.
    let mut holds = true;
    let mut margin = f64::INFINITY;
    for tau in [2, 8, 32, 128] {
        let best = pstar_pilot(tau)?;
        for &db in &grid_db {
            let rho = db_to_linear(db);
            for (mk, f) in [
                (MseKind::Blm, mse_blm_closed as fn(_, _) -> _),
                (MseKind::Sls, mse_sls_mol),
            ] {
                let gap = mse_bound_ones(mk, rho, tau)? - f(&best, rho)?;
                holds &= gap >= -1e-14;
                margin = margin.min(gap);
            }
        }
    }
    out.push(OracleReport::property(
        "worst-pilot mse bound dominates p-star",
        margin,
        0.0,
        holds,
    ));

    // Single valley of the MSE in rho.
    let mut unimodal = true;
    for tau in [8, 32, 128] {
        let p = pstar_pilot(tau)?;
        let vals = (0..=800)
            .map(|i| mse_blm_closed(&p, db_to_linear(-20.0 + i as f64 * 0.1)))
            .collect::<Result<Vec<_>>>()?;
        let turns = vals
            .windows(3)
            .filter(|w| (w[1] - w[0]) * (w[2] - w[1]) < 0.0)
            .count();
        unimodal &= turns == 1;
    }
    out.push(OracleReport::property(
        "mse has a single valley in rho",
        0.0,
        0.0,
        unimodal,
    ));

    // Optimal SNR of the bound: root of the stationarity condition, decreasing in tau.
    let taus = [4, 8, 16, 32, 64, 128, 256, 512, 1024];
    let stars = taus
        .iter()
        .map(|&t| solve_rho_star(t))
        .collect::<Result<Vec<_>>>()?;
    let residual = taus
        .iter()
        .zip(&stars)
        .map(|(&t, &r)| rho_star_residual(r, t).abs())
        .fold(0.0, f64::max);
    let decreasing = stars.windows(2).all(|w| w[1] < w[0]);
    out.push(OracleReport::property(
        "optimal pilot snr residual",
        residual,
        0.0,
        residual < 1e-10,
    ));
    out.push(OracleReport::property(
        "optimal pilot snr decreasing in tau",
        stars[0],
        stars[stars.len() - 1],
        decreasing,
    ));
    // rho-star minimizes the bound on a fine grid around it.
    let tau = 32;
    let star = solve_rho_star(tau)?;
    let at = mse_bound_ones(MseKind::Blm, star, tau)?;
    let mut below = true;
    for i in -200..=200 {
        let r = star * 10f64.powf(i as f64 * 0.005);
        below &= mse_bound_ones(MseKind::Blm, r, tau)? >= at - 1e-15;
    }
    out.push(OracleReport::property(
        "optimal pilot snr minimizes the bound",
        at,
        0.0,
        below,
    ));

    // Bound limits.
    let lim = mse_bound_ones_lim_rho(MseKind::Blm, 32)?;
    let far = mse_bound_ones(MseKind::Blm, 1e12, 32)?;
    out.push(OracleReport::new(
        "mse bound ones high-snr limit",
        real(lim),
        real(far),
        0.0,
        0,
        Tolerance::Absolute(1e-5),
    ));
    let lim = mse_bound_ones_lim_rho(MseKind::Sls, 32)?;
    let far = mse_bound_ones(MseKind::Sls, 1e12, 32)?;
    out.push(OracleReport::new(
        "mse sls bound ones high-snr limit",
        real(lim),
        real(far),
        0.0,
        0,
        Tolerance::Absolute(1e-5),
    ));
    for mk in [MseKind::Blm, MseKind::Sls] {
        let lim = mse_bound_ones_lim_tau(mk, 2.0)?;
        let far = mse_bound_ones(mk, 2.0, 10_000_000)?;
        out.push(OracleReport::new(
            format!("mse bound ones long-pilot limit {mk:?}"),
            real(lim),
            real(far),
            0.0,
            0,
            Tolerance::Absolute(1e-5),
        ));
    }

    // Every estimator collapses to the same MSE when tau = K.
    let mut worst: f64 = 0.0;
    for k in 1..=8 {
        let p = dft_pilots(k, k)?;
        for db in [-10.0, 0.0, 10.0, 30.0] {
            let rho = db_to_linear(db);
            let want = mse_tau_eq_k(rho, k);
            for v in [
                mse_blm_closed(&p, rho)?,
                mse_sls_mol(&p, rho)?,
                mse_sls_opt(&p, rho)?,
            ] {
                worst = worst.max((v - want).abs());
            }
        }
    }
    out.push(OracleReport::property(
        "mse collapse at tau = K",
        worst,
        0.0,
        worst < 1e-13,
    ));

    // Symbol statistics: shared-phase symbols merge at high SNR.
    let p = pstar_pilot(32)?;
    let model = SymbolModel::new(&p, db_to_linear(40.0), 128)?;
    let inner = c(1.0, 1.0) / 10f64.sqrt();
    let (a, b) = (model.expected(inner)?, model.expected(inner * 3.0)?);
    let dir = (a / a.norm() - b / b.norm()).norm();
    let mag = (a.norm() - b.norm()).abs() / b.norm();
    out.push(OracleReport::property(
        "shared-phase symbols merge at 40 dB",
        dir,
        mag,
        dir < 0.01 && mag < 0.02,
    ));

    // The erf transfer is monotone in |Re h|.
    let mut last = -1.0;
    let mut monotone = true;
    for i in 0..200 {
        let v = amplitude_transfer(c(i as f64 * 0.005, 0.1), 3.0).norm();
        monotone &= v > last;
        last = v;
    }
    out.push(OracleReport::property(
        "erf amplitude monotone in |Re h|",
        0.0,
        0.0,
        monotone,
    ));

    // Monte Carlo standard error shrinks as 1/sqrt(N).
    let p = dft_pilots(32, 4)?;
    let se = |n: usize, seed: u64| -> Result<f64> {
        let cfg = SystemConfig::new(4, 4, 32, 10.0, n, seed)?;
        Ok(empirical_mse(EstimatorKind::SlsOpt, &cfg, &p)?.std_error)
    };
    let s = seeds.next();
    let ratio = se(10_000, s)? / se(40_000, s)?;
    out.push(OracleReport::new(
        "monte carlo error halves from 1e4 to 4e4 trials",
        real(2.0),
        real(ratio),
        0.0,
        40_000,
        Tolerance::Relative(0.2),
    ));
    Ok(())
}
