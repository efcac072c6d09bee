use crate::error::{arg_err, Result};

/// Scalar system parameters shared by every experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// Base-station antennas.
    pub m: usize,
    /// Single-antenna users.
    pub k: usize,
    /// Pilot length.
    pub tau: usize,
    /// Transmit SNR, linear.
    pub rho: f64,
    pub trials: usize,
    pub seed: u64,
}

impl SystemConfig {
    pub fn new(m: usize, k: usize, tau: usize, rho: f64, trials: usize, seed: u64) -> Result<Self> {
        let cfg = Self {
            m,
            k,
            tau,
            rho,
            trials,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.k == 0 {
            return arg_err(format!(
                "M = {} and K = {} must be at least 1",
                self.m, self.k
            ));
        }
        if self.tau < self.k {
            return arg_err(format!(
                "pilot length {} is shorter than K = {}",
                self.tau, self.k
            ));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return arg_err(format!("SNR must be positive and finite, got {}", self.rho));
        }
        if self.trials == 0 {
            return arg_err("trial count must be at least 1");
        }
        Ok(())
    }

    pub fn with_rho(self, rho: f64) -> Result<Self> {
        Self { rho, ..self }.validate_into()
    }

    fn validate_into(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }
}

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
