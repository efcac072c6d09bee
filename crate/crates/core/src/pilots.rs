//! Pilot matrices.
//!
//! A pilot matrix is `tau x K` with unit-modulus entries and orthogonal
//! columns (`P^H P = tau I`). Whether `P P^H` is circulant decides which
//! closed forms apply, so the flag is computed once at construction.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::cmatrix::CMatrix;
use crate::error::{arg_err, Error, Result};

/// Tolerance used for the structural checks at construction.
pub const STRUCTURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PilotKind {
    /// First `K` columns of the `tau`-point DFT matrix.
    Dft,
    /// Single-user pilot with phases equispaced on a quarter circle.
    PStar,
    /// Single-user all-ones pilot.
    Ones,
}

impl PilotKind {
    pub fn build(self, tau: usize, k: usize) -> Result<PilotMatrix> {
        match self {
            PilotKind::Dft => dft_pilots(tau, k),
            PilotKind::PStar | PilotKind::Ones if k != 1 => {
                arg_err(format!("{self} pilots are single-user, got K = {k}"))
            }
            PilotKind::PStar => pstar_pilot(tau),
            PilotKind::Ones => ones_pilot(tau),
        }
    }
}

impl fmt::Display for PilotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PilotKind::Dft => "dft",
            PilotKind::PStar => "pstar",
            PilotKind::Ones => "ones",
        })
    }
}

impl FromStr for PilotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dft" => Ok(PilotKind::Dft),
            "pstar" => Ok(PilotKind::PStar),
            "ones" => Ok(PilotKind::Ones),
            other => arg_err(format!(
                "unknown pilot kind `{other}` (expected dft, pstar or ones)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PilotMatrix {
    entries: CMatrix,
    circulant_gram: bool,
}

impl PilotMatrix {
    /// Validates unit modulus and column orthogonality.
    pub fn from_matrix(entries: CMatrix) -> Result<Self> {
        let (tau, k) = entries.shape();
        if k == 0 || tau < k {
            return arg_err(format!("pilot shape {tau}x{k} needs tau >= K >= 1"));
        }
        if let Some(z) = entries
            .as_slice()
            .iter()
            .find(|z| (z.norm_sqr() - 1.0).abs() > STRUCTURE_TOL)
        {
            return arg_err(format!("pilot entry {z} is not unit modulus"));
        }
        let gram = entries.adjoint().matmul(&entries)?;
        let expected = CMatrix::identity(k).scale(tau as f64);
        if gram.max_abs_diff(&expected)? > STRUCTURE_TOL * tau as f64 {
            return arg_err("pilot columns are not orthogonal");
        }
        let circulant_gram = circulant_scan(&outer_gram(&entries), STRUCTURE_TOL * tau as f64);
        Ok(Self {
            entries,
            circulant_gram,
        })
    }

    #[inline]
    pub fn tau(&self) -> usize {
        self.entries.rows()
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.entries.cols()
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    #[inline]
    pub fn get(&self, u: usize, k: usize) -> Complex64 {
        self.entries[(u, k)]
    }

    pub fn column(&self, k: usize) -> Vec<Complex64> {
        self.entries.column(k)
    }

    pub fn circulant_gram(&self) -> bool {
        self.circulant_gram
    }

    /// `P P^H`, the `tau x tau` Gram matrix across pilot slots.
    pub fn slot_gram(&self) -> CMatrix {
        outer_gram(&self.entries)
    }
}

fn outer_gram(p: &CMatrix) -> CMatrix {
    let (tau, k) = p.shape();
    CMatrix::from_fn(tau, tau, |u, v| {
        (0..k).map(|i| p[(u, i)] * p[(v, i)].conj()).sum()
    })
}

fn circulant_scan(g: &CMatrix, tol: f64) -> bool {
    let n = g.rows();
    (0..n).all(|u| (0..n).all(|v| (g[(u, v)] - g[(0, (v + n - u) % n)]).norm() <= tol))
}

/// First `k` columns of the `tau`-point DFT matrix, `exp(-j 2 pi u k / tau)`.
pub fn dft_pilots(tau: usize, k: usize) -> Result<PilotMatrix> {
    if k == 0 || tau < k {
        return arg_err(format!(
            "DFT pilots need tau >= K >= 1, got tau = {tau}, K = {k}"
        ));
    }
    let entries = CMatrix::from_fn(tau, k, |u, c| {
        // Reduce the exponent first so large tau keeps full phase accuracy.
        let idx = (u * c) % tau;
        Complex64::from_polar(1.0, -2.0 * PI * idx as f64 / tau as f64)
    });
    PilotMatrix::from_matrix(entries)
}

/// `[1, e^{-j pi/(2 tau)}, ..., e^{-j (tau-1) pi/(2 tau)}]^T`.
pub fn pstar_pilot(tau: usize) -> Result<PilotMatrix> {
    if tau == 0 {
        return arg_err("pilot length must be at least 1");
    }
    let entries = CMatrix::from_fn(tau, 1, |u, _| {
        Complex64::from_polar(1.0, -(u as f64) * PI / (2.0 * tau as f64))
    });
    PilotMatrix::from_matrix(entries)
}

pub fn ones_pilot(tau: usize) -> Result<PilotMatrix> {
    if tau == 0 {
        return arg_err("pilot length must be at least 1");
    }
    PilotMatrix::from_matrix(CMatrix::from_fn(tau, 1, |_, _| Complex64::new(1.0, 0.0)))
}

/// True when every wrapped diagonal of `P P^H` is constant within `tol`.
pub fn is_circulant_gram(p: &PilotMatrix, tol: f64) -> bool {
    circulant_scan(&p.slot_gram(), tol)
}
