use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{arg_err, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstellationKind {
    Qam16,
    Qpsk,
}

impl ConstellationKind {
    pub fn build(self) -> Constellation {
        match self {
            ConstellationKind::Qam16 => Constellation::qam16(),
            ConstellationKind::Qpsk => Constellation::qpsk(),
        }
    }
}

impl fmt::Display for ConstellationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstellationKind::Qam16 => "qam16",
            ConstellationKind::Qpsk => "qpsk",
        })
    }
}

impl FromStr for ConstellationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qam16" => Ok(ConstellationKind::Qam16),
            "qpsk" => Ok(ConstellationKind::Qpsk),
            other => arg_err(format!(
                "unknown constellation `{other}` (expected qam16 or qpsk)"
            )),
        }
    }
}

/// Unit average power transmit alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    label: String,
    symbols: Vec<Complex64>,
}

impl Constellation {
    pub fn new(label: impl Into<String>, symbols: Vec<Complex64>) -> Result<Self> {
        if symbols.is_empty() {
            return arg_err("constellation must contain at least one symbol");
        }
        let power = symbols.iter().map(|s| s.norm_sqr()).sum::<f64>() / symbols.len() as f64;
        if (power - 1.0).abs() > 1e-12 {
            return arg_err(format!(
                "constellation average power is {power}, expected 1"
            ));
        }
        for (i, a) in symbols.iter().enumerate() {
            if symbols[..i].iter().any(|b| (a - b).norm() < 1e-12) {
                return arg_err(format!("duplicate constellation point {a}"));
            }
        }
        Ok(Self {
            label: label.into(),
            symbols,
        })
    }

    /// Square 16-QAM, `{+-1 +-j, +-1 +-3j, +-3 +-j, +-3 +-3j} / sqrt(10)`.
    pub fn qam16() -> Self {
        let levels = [-3.0, -1.0, 1.0, 3.0];
        let norm = 10f64.sqrt();
        let symbols = levels
            .iter()
            .flat_map(|&re| {
                levels
                    .iter()
                    .map(move |&im| Complex64::new(re / norm, im / norm))
            })
            .collect();
        Self::new("qam16", symbols).expect("16-QAM is normalized")
    }

    pub fn qpsk() -> Self {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let symbols = vec![
            Complex64::new(a, a),
            Complex64::new(-a, a),
            Complex64::new(-a, -a),
            Complex64::new(a, -a),
        ];
        Self::new("qpsk", symbols).expect("QPSK is normalized")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}
