//! Channel estimation: pilot correlation structure, linear estimators and
//! their closed-form MSE.

mod estimators;
mod mse;

pub use estimators::{estimate, EstimatorKind, LinearEstimator, ScalingFactors};
pub use mse::{
    mse_asymptotic, mse_blm_closed, mse_bound_ones, mse_bound_ones_lim_rho, mse_bound_ones_lim_tau,
    mse_sls_closed, mse_sls_mol, mse_sls_opt, mse_tau_eq_k, rho_star_residual, solve_rho_star,
    MseKind,
};

use num_complex::Complex64;

use crate::cmatrix::CMatrix;
use crate::error::Result;
use crate::pilots::PilotMatrix;
use crate::quant::omega;

/// Correlation structure of the quantized pilot observations.
///
/// `phi` is the `tau x tau` matrix with `Sigma_p = (rho K + 1) phi (x) I_M`;
/// `delta_k` are the per-user corrections `p_k^T phi p_k^* - tau`, and the
/// `*_bar` fields are the same quantities in the `rho -> inf` limit.
#[derive(Debug, Clone)]
pub struct PilotCorrelation {
    pub phi: CMatrix,
    pub delta_k: Vec<f64>,
    pub delta: f64,
    pub delta_bar_k: Vec<f64>,
    pub delta_bar: f64,
}

impl PilotCorrelation {
    pub fn new(p: &PilotMatrix, rho: f64) -> Result<Self> {
        let phi = build_phi(p, rho)?;
        let delta_k = delta_k(p, rho)?;
        let delta_bar_k = delta_bar_k(p)?;
        Ok(Self {
            phi,
            delta: mean(&delta_k),
            delta_k,
            delta_bar: mean(&delta_bar_k),
            delta_bar_k,
        })
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Argument scale inside Omega: `rho / (rho K + 1)`, or `1 / K` as `rho -> inf`.
#[derive(Debug, Clone, Copy)]
enum Regime {
    Finite(f64),
    HighSnr,
}

impl Regime {
    fn scale(self, k: usize) -> f64 {
        match self {
            Regime::Finite(rho) => rho / (rho * k as f64 + 1.0),
            Regime::HighSnr => 1.0 / k as f64,
        }
    }
}

/// Omega of the real and imaginary slot cross-correlations,
/// `(Omega(c Re G_uv), Omega(c Im G_uv))` with `G = P P^H`.
fn omega_pairs(p: &PilotMatrix, regime: Regime) -> Result<Vec<(f64, f64)>> {
    let tau = p.tau();
    let c = regime.scale(p.k());
    let g = p.slot_gram();
    let mut out = Vec::with_capacity(tau * tau);
    for u in 0..tau {
        for v in 0..tau {
            if u == v {
                out.push((1.0, 0.0));
            } else {
                let guv = g[(u, v)];
                out.push((omega(c * guv.re)?, omega(c * guv.im)?));
            }
        }
    }
    Ok(out)
}

/// The normalized covariance of the vectorized quantized pilot block.
pub fn build_phi(p: &PilotMatrix, rho: f64) -> Result<CMatrix> {
    let tau = p.tau();
    let pairs = omega_pairs(p, Regime::Finite(rho))?;
    Ok(CMatrix::from_fn(tau, tau, |u, v| {
        if u == v {
            Complex64::new(1.0, 0.0)
        } else {
            let (a, b) = pairs[u * tau + v];
            Complex64::new(a, -b)
        }
    }))
}

fn deltas(p: &PilotMatrix, regime: Regime) -> Result<Vec<f64>> {
    let tau = p.tau();
    let pairs = omega_pairs(p, regime)?;
    Ok((0..p.k())
        .map(|k| {
            let col = p.column(k);
            let mut acc = 0.0;
            for u in 0..tau {
                for v in 0..tau {
                    if u == v {
                        continue;
                    }
                    let cross = col[u].conj() * col[v];
                    let (a, b) = pairs[u * tau + v];
                    acc += cross.re * a - cross.im * b;
                }
            }
            acc
        })
        .collect())
}

/// Per-user pilot corrections at finite SNR.
pub fn delta_k(p: &PilotMatrix, rho: f64) -> Result<Vec<f64>> {
    deltas(p, Regime::Finite(rho))
}

/// Per-user pilot corrections in the high-SNR limit.
pub fn delta_bar_k(p: &PilotMatrix) -> Result<Vec<f64>> {
    deltas(p, Regime::HighSnr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pilots::{dft_pilots, ones_pilot, pstar_pilot};

    /// Independent double loop straight from the definition, sharing nothing
    /// with the implementation beyond `asin`.
    fn delta_oracle(p: &PilotMatrix, rho: f64) -> Vec<f64> {
        let (tau, kk) = (p.tau(), p.k());
        let om = |w: f64| 2.0 / std::f64::consts::PI * w.clamp(-1.0, 1.0).asin();
        (0..kk)
            .map(|k| {
                let mut d = 0.0;
                for u in 0..tau {
                    for v in 0..tau {
                        if u != v {
                            let mut sr = 0.0;
                            let mut si = 0.0;
                            for i in 0..kk {
                                let z = p.get(u, i) * p.get(v, i).conj();
                                sr += z.re;
                                si += z.im;
                            }
                            let c = p.get(u, k).conj() * p.get(v, k);
                            let den = rho * kk as f64 + 1.0;
                            d += c.re * om(rho * sr / den) - c.im * om(rho * si / den);
                        }
                    }
                }
                d
            })
            .collect()
    }

    #[test]
    fn phi_is_identity_when_tau_equals_k() {
        let p = dft_pilots(8, 8).unwrap();
        let phi = build_phi(&p, 10.0).unwrap();
        assert!(phi.max_abs_diff(&CMatrix::identity(8)).unwrap() < 1e-14);
        let corr = PilotCorrelation::new(&p, 10.0).unwrap();
        assert!(corr.delta_k.iter().all(|d| d.abs() < 1e-12));
        assert!(corr.delta_bar_k.iter().all(|d| d.abs() < 1e-12));
    }

    #[test]
    fn phi_for_ones_pilot() {
        let rho = 3.0;
        let phi = build_phi(&ones_pilot(5).unwrap(), rho).unwrap();
        let want = omega(rho / (rho + 1.0)).unwrap();
        for u in 0..5 {
            for v in 0..5 {
                let z = phi[(u, v)];
                if u == v {
                    assert_eq!(z, Complex64::new(1.0, 0.0));
                } else {
                    assert!((z.re - want).abs() < 1e-15 && z.im.abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn phi_hermitian_psd_circulant() {
        let p = dft_pilots(8, 3).unwrap();
        let phi = build_phi(&p, 10.0).unwrap();
        assert!(phi.is_hermitian(1e-14));
        let eig = nalgebra::SymmetricEigen::new(phi.to_nalgebra());
        assert!(
            eig.eigenvalues.iter().all(|&l| l > -1e-12),
            "{:?}",
            eig.eigenvalues
        );
        let n = 8;
        for u in 0..n {
            for v in 0..n {
                assert!((phi[(u, v)] - phi[(0, (v + n - u) % n)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn delta_matches_double_loop() {
        for (tau, k, rho) in [(32, 4, 10.0), (16, 3, 0.3), (12, 1, 100.0)] {
            let p = dft_pilots(tau, k).unwrap();
            let got = delta_k(&p, rho).unwrap();
            for (g, w) in got.iter().zip(delta_oracle(&p, rho)) {
                assert!((g - w).abs() < 1e-9 * w.abs().max(1.0), "{g} vs {w}");
            }
        }
        let p = pstar_pilot(9).unwrap();
        assert!((delta_k(&p, 2.0).unwrap()[0] - delta_oracle(&p, 2.0)[0]).abs() < 1e-10);
    }

    #[test]
    fn delta_is_quadratic_form_of_phi() {
        // p_k^T phi p_k^* = tau + delta_k, computed by plain matrix products.
        let p = dft_pilots(16, 3).unwrap();
        let rho = 5.0;
        let phi = build_phi(&p, rho).unwrap();
        let d = delta_k(&p, rho).unwrap();
        for k in 0..3 {
            let col = CMatrix::column_vector(p.column(k));
            let q = col
                .transpose()
                .matmul(&phi)
                .unwrap()
                .matmul(&col.conj())
                .unwrap()[(0, 0)];
            assert!((q.re - (16.0 + d[k])).abs() < 1e-10 && q.im.abs() < 1e-10);
        }
    }

    #[test]
    fn ones_pilot_delta_closed_value() {
        // tau (tau - 1) Omega(rho / (rho + 1)); rho = 1, tau = 2 gives 2/3.
        let d = delta_k(&ones_pilot(2).unwrap(), 1.0).unwrap()[0];
        assert!((d - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn delta_bar_is_large_snr_delta() {
        let p = dft_pilots(32, 4).unwrap();
        let bar = delta_bar_k(&p).unwrap();
        let big = delta_k(&p, 1e9).unwrap();
        for (b, d) in bar.iter().zip(big) {
            assert!((b - d).abs() < 1e-3);
        }
    }
}
