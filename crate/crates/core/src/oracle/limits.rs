//! Large-`tau` limits of pilot-averaged quantized observations.

use std::f64::consts::{FRAC_1_PI, PI};

use num_complex::Complex64;

use super::report::{OracleReport, Tolerance};
use crate::error::{arg_err, Result};
use crate::quant::{quantize_scalar, quantizer_scale};
use crate::rng::SeededRng;

fn check(rho: f64, tau: usize) -> Result<()> {
    if !(rho > 0.0 && rho.is_finite()) || tau == 0 {
        return arg_err(format!(
            "need rho > 0 and tau >= 1, got rho = {rho}, tau = {tau}"
        ));
    }
    Ok(())
}

fn probe_pilot(tau: usize, u: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * u as f64 / tau as f64)
}

/// `(1/tau) sum_u Q(sqrt(rho) h p_u^* + z_u) p_u` with pilots spread over the
/// unit circle, against `(4/pi) sqrt((rho + 1)/2) e^{j arg h}`.
///
/// The gate is `8 * scale / tau` for the pilot discretization plus three
/// standard deviations of the noise-driven sign flips; the angle error must
/// stay below `2 pi / tau` plus the same noise allowance.
pub fn phase_recovery_check(h: Complex64, rho: f64, tau: usize, seed: u64) -> Result<OracleReport> {
    check(rho, tau)?;
    if h.norm() == 0.0 {
        return arg_err("phase recovery needs a nonzero channel");
    }
    let scale = quantizer_scale(rho, 1);
    let t = tau as f64;
    let mut rng = SeededRng::new(seed, 0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut var = 0.0;
    for u in 0..tau {
        let p = probe_pilot(tau, u);
        let y = h * p.conj() * rho.sqrt();
        sum += quantize_scalar(y + rng.cn01(), scale) * p;
        let (a, b) = (libm::erf(y.re), libm::erf(y.im));
        var += scale * scale * (2.0 - a * a - b * b);
    }
    let avg = sum / t;
    let sigma = var.sqrt() / t;
    let closed = Complex64::from_polar(4.0 * FRAC_1_PI * scale, h.arg());
    let angle_err = (avg / closed).arg().abs();
    Ok(OracleReport::new(
        format!("phase recovery arg(h)={:.4} rho={rho:e} tau={tau}", h.arg()),
        closed,
        avg,
        sigma,
        tau,
        Tolerance::Absolute(8.0 * scale / t + 3.0 * sigma),
    )
    .and(angle_err < 2.0 * PI / t + 3.0 * sigma / closed.norm()))
}

/// Noiseless `(1/tau) sum_u Q(h p_u^*) p_u` with a unit quantizer scale; its
/// limit is `(4/pi) e^{j arg h}`.
pub fn phase_recovery_noiseless(h: Complex64, tau: usize) -> Complex64 {
    (0..tau)
        .map(|u| {
            let p = probe_pilot(tau, u);
            quantize_scalar(h * p.conj(), 1.0) * p
        })
        .sum::<Complex64>()
        / tau as f64
}

/// Angle error of the noiseless phase estimate, which must be below `2 pi / tau`.
pub fn phase_angle_check(h: Complex64, tau: usize) -> Result<OracleReport> {
    check(1.0, tau)?;
    let err = (phase_recovery_noiseless(h, tau) / h).arg().abs();
    let bound = 2.0 * PI / tau as f64;
    Ok(OracleReport::property(
        format!(
            "noiseless phase recovery angle arg(h)={:.4} tau={tau}",
            h.arg()
        ),
        err,
        bound,
        err < bound,
    ))
}

/// Rotating every probe pilot by `j` leaves each noiseless term
/// `Q(h p_u^*) p_u` unchanged. Reports the largest termwise difference.
pub fn quarter_shift_check(h: Complex64, tau: usize) -> Result<OracleReport> {
    check(1.0, tau)?;
    let j = Complex64::new(0.0, 1.0);
    let worst = (0..tau)
        .map(|u| {
            let p = probe_pilot(tau, u);
            let q = p * j;
            let a = quantize_scalar(h * p.conj(), 1.0) * p;
            let b = quantize_scalar(h * q.conj(), 1.0) * q;
            (a - b).norm()
        })
        .fold(0.0, f64::max);
    Ok(OracleReport::property(
        format!("quarter-shifted pilot arg(h)={:.4} tau={tau}", h.arg()),
        worst,
        0.0,
        worst < 1e-12,
    ))
}

/// `sqrt((rho + 1)/2) (erf(sqrt(rho) Re h) + j erf(sqrt(rho) Im h))`.
pub fn amplitude_transfer(h: Complex64, rho: f64) -> Complex64 {
    let g = rho.sqrt();
    Complex64::new(libm::erf(g * h.re), libm::erf(g * h.im)) * quantizer_scale(rho, 1)
}

/// `(1/tau) sum_u Q(sqrt(rho) h + z_u)` with the all-ones pilot against the
/// erf transfer. Each component is gated at 3 binomial standard deviations.
pub fn amplitude_transfer_check(
    h: Complex64,
    rho: f64,
    tau: usize,
    seed: u64,
) -> Result<OracleReport> {
    check(rho, tau)?;
    let scale = quantizer_scale(rho, 1);
    let mut rng = SeededRng::new(seed, 0);
    let y = h * rho.sqrt();
    let sum: Complex64 = (0..tau)
        .map(|_| quantize_scalar(y + rng.cn01(), scale))
        .sum();
    let avg = sum / tau as f64;
    let closed = amplitude_transfer(h, rho);
    let t = tau as f64;
    let sd = |e: f64| scale * ((1.0 - (e / scale).powi(2)).max(0.0) / t).sqrt();
    let (sd_re, sd_im) = (sd(closed.re), sd(closed.im));
    let within =
        (avg.re - closed.re).abs() <= 3.0 * sd_re && (avg.im - closed.im).abs() <= 3.0 * sd_im;
    let mut report = OracleReport::new(
        format!(
            "erf amplitude h={:.4}{:+.4}i rho={rho:e} tau={tau}",
            h.re, h.im
        ),
        closed,
        avg,
        sd_re.max(sd_im),
        tau,
        Tolerance::Sigma(3.0),
    );
    report.pass = within;
    Ok(report)
}
