use std::fmt;

use num_complex::Complex64;

/// How a report decides pass or fail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    /// Real and imaginary parts each within `k * std_error`.
    Sigma(f64),
    /// `|closed - empirical| <= r * |closed|`.
    Relative(f64),
    /// `|closed - empirical| <= a`.
    Absolute(f64),
    /// A deterministic property; `pass` is set by the check itself.
    Property,
}

impl fmt::Display for Tolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tolerance::Sigma(k) => write!(f, "{k}sigma"),
            Tolerance::Relative(r) => write!(f, "rel:{r:e}"),
            Tolerance::Absolute(a) => write!(f, "abs:{a:e}"),
            Tolerance::Property => f.write_str("property"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub name: String,
    pub closed_form: Complex64,
    pub empirical: Complex64,
    pub std_error: f64,
    pub n_trials: usize,
    pub tolerance: Tolerance,
    pub pass: bool,
}

impl OracleReport {
    pub fn new(
        name: impl Into<String>,
        closed_form: Complex64,
        empirical: Complex64,
        std_error: f64,
        n_trials: usize,
        tolerance: Tolerance,
    ) -> Self {
        let diff = closed_form - empirical;
        let pass = match tolerance {
            Tolerance::Sigma(k) => diff.re.abs() <= k * std_error && diff.im.abs() <= k * std_error,
            Tolerance::Relative(r) => diff.norm() <= r * closed_form.norm(),
            Tolerance::Absolute(a) => diff.norm() <= a,
            Tolerance::Property => diff.norm() == 0.0,
        };
        Self {
            name: name.into(),
            closed_form,
            empirical,
            std_error,
            n_trials,
            tolerance,
            pass: pass && closed_form.re.is_finite() && empirical.re.is_finite(),
        }
    }

    /// The default 3-sigma gate on a real quantity.
    pub fn sigma3(
        name: impl Into<String>,
        closed_form: f64,
        empirical: f64,
        std_error: f64,
        n_trials: usize,
    ) -> Self {
        Self::new(
            name,
            real(closed_form),
            real(empirical),
            std_error,
            n_trials,
            Tolerance::Sigma(3.0),
        )
    }

    /// A property check recording the two compared values and its verdict.
    pub fn property(name: impl Into<String>, lhs: f64, rhs: f64, holds: bool) -> Self {
        Self {
            name: name.into(),
            closed_form: real(lhs),
            empirical: real(rhs),
            std_error: 0.0,
            n_trials: 0,
            tolerance: Tolerance::Property,
            pass: holds,
        }
    }

    /// Adds an extra condition to the verdict.
    pub fn and(mut self, holds: bool) -> Self {
        self.pass &= holds;
        self
    }

    pub fn deviation(&self) -> f64 {
        (self.closed_form - self.empirical).norm()
    }

    /// Deviation in units of the standard error.
    pub fn z_score(&self) -> f64 {
        if self.std_error > 0.0 {
            self.deviation() / self.std_error
        } else if self.deviation() == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: closed {:.6e}{:+.6e}i empirical {:.6e}{:+.6e}i se {:.3e} n {} [{}]",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.closed_form.re,
            self.closed_form.im,
            self.empirical.re,
            self.empirical.im,
            self.std_error,
            self.n_trials,
            self.tolerance
        )
    }
}

pub(crate) fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}
