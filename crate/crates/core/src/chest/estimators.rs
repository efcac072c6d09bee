use std::f64::consts::FRAC_2_PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::PilotCorrelation;
use crate::cmatrix::CMatrix;
use crate::error::{arg_err, Error, Result};
use crate::pilots::PilotMatrix;

/// Ridge added to the pilot correlation when the plain factorization fails.
pub const PHI_RIDGE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatorKind {
    /// Bussgang LMMSE through the full `tau x tau` correlation solve.
    BlmFull,
    /// Bussgang LMMSE as per-user scaled correlation (circulant Gram only).
    BlmSimplified,
    /// Scaled LS with the common factor that ignores distortion correlation.
    SlsMol,
    /// Scaled LS with the MSE-optimal common factor.
    SlsOpt,
    SlsCustom(f64),
}

impl EstimatorKind {
    pub const STANDARD: [EstimatorKind; 4] = [
        EstimatorKind::BlmFull,
        EstimatorKind::BlmSimplified,
        EstimatorKind::SlsMol,
        EstimatorKind::SlsOpt,
    ];

    pub fn label(&self) -> String {
        self.to_string().replace([':', '.', '-'], "_")
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorKind::BlmFull => f.write_str("blm-full"),
            EstimatorKind::BlmSimplified => f.write_str("blm-simplified"),
            EstimatorKind::SlsMol => f.write_str("sls-mol"),
            EstimatorKind::SlsOpt => f.write_str("sls-opt"),
            EstimatorKind::SlsCustom(psi) => write!(f, "sls-custom:{psi}"),
        }
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "blm-full" => Ok(EstimatorKind::BlmFull),
            "blm-simplified" | "blm" => Ok(EstimatorKind::BlmSimplified),
            "sls-mol" | "sls" => Ok(EstimatorKind::SlsMol),
            "sls-opt" => Ok(EstimatorKind::SlsOpt),
            other => match other.strip_prefix("sls-custom:") {
                Some(v) => {
                    let psi: f64 = v
                        .parse()
                        .map_err(|_| Error::Argument(format!("bad scaling factor `{v}`")))?;
                    if !(psi > 0.0 && psi.is_finite()) {
                        return arg_err(format!(
                            "custom scaling factor must be positive, got {psi}"
                        ));
                    }
                    Ok(EstimatorKind::SlsCustom(psi))
                }
                None => arg_err(format!("unknown estimator `{other}`")),
            },
        }
    }
}

/// The scalar gains of the scaled-correlation estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFactors {
    /// Common factor that ignores the temporal correlation of the distortion.
    pub psi_mol: f64,
    /// MSE-minimizing common factor.
    pub psi_opt: f64,
    /// Per-user factors of the simplified Bussgang estimator.
    pub psi_k: Vec<f64>,
}

impl ScalingFactors {
    pub fn new(corr: &PilotCorrelation, tau: usize, k: usize, rho: f64) -> Self {
        let t = tau as f64;
        let kk = k as f64;
        let psi_mol = FRAC_2_PI * rho * (FRAC_2_PI * rho * (t - kk) + rho * kk + 1.0).powi(-2);
        let opt = |d: f64| FRAC_2_PI * rho * t * t / ((rho * kk + 1.0).powi(2) * (t + d).powi(2));
        Self {
            psi_mol,
            psi_opt: opt(corr.delta),
            psi_k: corr.delta_k.iter().map(|&d| opt(d)).collect(),
        }
    }

    pub fn from_pilot(p: &PilotMatrix, rho: f64) -> Result<Self> {
        let corr = PilotCorrelation::new(p, rho)?;
        Ok(Self::new(&corr, p.tau(), p.k(), rho))
    }
}

/// Every estimator here is `H_hat = R_p W` for a `tau x K` weight matrix `W`
/// that depends only on the pilots and the SNR, so `W` is built once and
/// applied per realization.
#[derive(Debug, Clone)]
pub struct LinearEstimator {
    kind: EstimatorKind,
    weights: CMatrix,
}

impl LinearEstimator {
    pub fn new(kind: EstimatorKind, p: &PilotMatrix, rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return arg_err(format!("SNR must be positive, got {rho}"));
        }
        let weights = match kind {
            EstimatorKind::BlmFull => full_blm_weights(p, rho)?,
            EstimatorKind::BlmSimplified => {
                require_simplified_form(p)?;
                let psi = ScalingFactors::from_pilot(p, rho)?;
                let gains: Vec<f64> = psi.psi_k.iter().map(|x| x.sqrt()).collect();
                CMatrix::from_fn(p.tau(), p.k(), |u, k| p.get(u, k) * gains[k])
            }
            EstimatorKind::SlsMol => p
                .matrix()
                .scale(ScalingFactors::from_pilot(p, rho)?.psi_mol.sqrt()),
            EstimatorKind::SlsOpt => p
                .matrix()
                .scale(ScalingFactors::from_pilot(p, rho)?.psi_opt.sqrt()),
            EstimatorKind::SlsCustom(psi) => {
                if !(psi > 0.0 && psi.is_finite()) {
                    return arg_err(format!("custom scaling factor must be positive, got {psi}"));
                }
                p.matrix().scale(psi.sqrt())
            }
        };
        Ok(Self { kind, weights })
    }

    pub fn kind(&self) -> EstimatorKind {
        self.kind
    }

    pub fn weights(&self) -> &CMatrix {
        &self.weights
    }

    /// Applies the estimator to an `M x tau` quantized pilot block.
    pub fn apply(&self, rp: &CMatrix) -> Result<CMatrix> {
        if rp.cols() != self.weights.rows() {
            return Err(Error::Shape {
                expected: (rp.rows(), self.weights.rows()),
                got: rp.shape(),
            });
        }
        rp.matmul(&self.weights)
    }
}

/// The per-user simplification relies on `P` diagonalizing `phi`, which holds
/// for circulant `P P^H`; with a single user it is the optimal scaled LS
/// estimator for any pilot.
fn require_simplified_form(p: &PilotMatrix) -> Result<()> {
    if p.circulant_gram() || p.k() == 1 {
        Ok(())
    } else {
        Err(Error::Precondition(
            "simplified Bussgang estimator requires a circulant pilot Gram matrix".into(),
        ))
    }
}

/// `W = sqrt(2 rho / pi) / (rho K + 1) * phi^{-T} P`.
///
/// With `Sigma_p = (rho K + 1) phi (x) I_M`, the vectorized estimator
/// `P~^T Sigma_p^{-1} vec(R_p)` reshapes to `R_p phi^{-T} P / (rho K + 1)`, so
/// only the `tau x tau` Hermitian system `conj(phi) X = P` is solved.
fn full_blm_weights(p: &PilotMatrix, rho: f64) -> Result<CMatrix> {
    let phi = super::build_phi(p, rho)?;
    let a = phi.conj().to_nalgebra();
    let b = p.matrix().to_nalgebra();
    let x = hermitian_solve(a, &b)?;
    let c = (FRAC_2_PI * rho).sqrt() / (rho * p.k() as f64 + 1.0);
    Ok(CMatrix::from_nalgebra(&x).scale(c))
}

fn hermitian_solve(a: DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    if let Some(chol) = a.clone().cholesky() {
        return Ok(chol.solve(b));
    }
    let n = a.nrows();
    let ridged = &a + DMatrix::<Complex64>::identity(n, n) * Complex64::new(PHI_RIDGE, 0.0);
    if let Some(chol) = ridged.cholesky() {
        log::warn!("pilot correlation not positive definite, solved with ridge {PHI_RIDGE:e}");
        return Ok(chol.solve(b));
    }
    let eig = SymmetricEigen::new(a);
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &l| {
            (lo.min(l.abs()), hi.max(l.abs()))
        });
    Err(Error::SingularCorrelation { condition: hi / lo })
}

/// Channel estimate `M x K` from the quantized pilot block `rp` (`M x tau`).
pub fn estimate(kind: EstimatorKind, rp: &CMatrix, p: &PilotMatrix, rho: f64) -> Result<CMatrix> {
    LinearEstimator::new(kind, p, rho)?.apply(rp)
}
