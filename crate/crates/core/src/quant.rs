//! The arcsine transfer function and the 1-bit quantizer.

use std::f64::consts::FRAC_2_PI;

use num_complex::Complex64;

use crate::cmatrix::CMatrix;
use crate::error::{Error, Result};

/// Arguments this far outside `[-1, 1]` are rounding noise and get clamped.
pub const OMEGA_CLAMP_EPS: f64 = 1e-12;

/// `(2/pi) * asin(w)`: the correlation of two sign-quantized jointly Gaussian
/// variables with correlation coefficient `w`.
pub fn omega(w: f64) -> Result<f64> {
    if w.is_nan() || w.abs() > 1.0 + OMEGA_CLAMP_EPS {
        return Err(Error::Domain(w));
    }
    Ok(FRAC_2_PI * w.clamp(-1.0, 1.0).asin())
}

/// Sign with `sgn(0) = +1`.
#[inline]
pub fn sgn(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Output amplitude per real dimension, `sqrt((rho K + 1) / 2)`.
#[inline]
pub fn quantizer_scale(rho: f64, k: usize) -> f64 {
    ((rho * k as f64 + 1.0) / 2.0).sqrt()
}

#[inline]
pub fn quantize_scalar(z: Complex64, scale: f64) -> Complex64 {
    Complex64::new(scale * sgn(z.re), scale * sgn(z.im))
}

/// Entrywise 1-bit quantization of the in-phase and quadrature parts.
pub fn quantize(a: &CMatrix, rho: f64, k: usize) -> CMatrix {
    let scale = quantizer_scale(rho, k);
    a.map(|z| quantize_scalar(z, scale))
}
