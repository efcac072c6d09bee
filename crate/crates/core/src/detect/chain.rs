//! End-to-end uplink chain: pilot phase, channel estimate, data phase, MRC
//! and minimum distance detection.

use num_complex::Complex64;
use rand::Rng;

use super::{require_single_user, Constellation, SymbolModel};
use crate::chest::{EstimatorKind, LinearEstimator};
use crate::cmatrix::CMatrix;
use crate::config::SystemConfig;
use crate::error::{arg_err, Error, Result};
use crate::pilots::PilotMatrix;
use crate::quant::{quantize, quantize_scalar, quantizer_scale};
use crate::rng::{run_trials, sample_cn01, SeededRng};

/// Quantized data-phase observation `Q(sqrt(rho) h s + z)` for one user.
pub fn uplink_receive(h: &CMatrix, s: Complex64, rho: f64, rng: &mut SeededRng) -> Result<CMatrix> {
    if h.cols() != 1 {
        return arg_err(format!("expected an M x 1 channel, got {:?}", h.shape()));
    }
    let scale = quantizer_scale(rho, 1);
    let gain = rho.sqrt() * s;
    Ok(CMatrix::from_fn(h.rows(), 1, |i, _| {
        quantize_scalar(h[(i, 0)] * gain + rng.cn01(), scale)
    }))
}

/// `hhat^H r`.
pub fn mrc_soft(hhat: &CMatrix, r: &CMatrix) -> Result<Complex64> {
    if hhat.shape() != r.shape() || hhat.cols() != 1 {
        return Err(Error::Shape {
            expected: hhat.shape(),
            got: r.shape(),
        });
    }
    Ok(hhat
        .as_slice()
        .iter()
        .zip(r.as_slice())
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Index of the nearest expected point; the lowest index wins ties.
pub fn mdd(xhat: Complex64, expected: &[Complex64]) -> Result<usize> {
    if expected.is_empty() {
        return arg_err("minimum distance detection needs at least one point");
    }
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, e) in expected.iter().enumerate() {
        let d = (xhat - e).norm_sqr();
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Receiver {
    /// 1-bit pilot and data observations, BLM channel estimate.
    OneBit,
    /// Unquantized data observation combined with the true channel and
    /// normalized by `|h|^2 / M`, so only the noise can cause errors.
    Genie,
}

/// Everything fixed across trials of one `(P, rho, M, constellation)` point.
#[derive(Debug, Clone)]
pub struct DetectionChain {
    pilot: PilotMatrix,
    rho: f64,
    m: usize,
    receiver: Receiver,
    estimator: LinearEstimator,
    constellation: Constellation,
    expected: Vec<Complex64>,
}

/// Outcome of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub sent: usize,
    pub detected: usize,
    pub xhat: Complex64,
}

impl DetectionChain {
    pub fn new(
        p: &PilotMatrix,
        rho: f64,
        m: usize,
        constellation: &Constellation,
        receiver: Receiver,
    ) -> Result<Self> {
        require_single_user(p)?;
        let estimator = LinearEstimator::new(EstimatorKind::BlmSimplified, p, rho)?;
        let expected = match receiver {
            Receiver::OneBit => {
                let model = SymbolModel::new(p, rho, m)?;
                constellation
                    .symbols()
                    .iter()
                    .map(|&s| model.expected(s))
                    .collect::<Result<Vec<_>>>()?
            }
            Receiver::Genie => constellation
                .symbols()
                .iter()
                .map(|&s| s * (rho.sqrt() * m as f64))
                .collect(),
        };
        Ok(Self {
            pilot: p.clone(),
            rho,
            m,
            receiver,
            estimator,
            constellation: constellation.clone(),
            expected,
        })
    }

    pub fn expected(&self) -> &[Complex64] {
        &self.expected
    }

    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    /// Soft estimate of `s` for one fresh channel and noise realization.
    /// Draw order: channel, pilot noise, data noise.
    pub fn sample_xhat(&self, s: Complex64, rng: &mut SeededRng) -> Result<Complex64> {
        let (h, hhat) = self.channel_phase(rng)?;
        self.data_phase(&h, &hhat, s, rng)
    }

    /// One SER trial with a uniformly drawn symbol.
    pub fn trial(&self, rng: &mut SeededRng) -> Result<TrialOutcome> {
        let (h, hhat) = self.channel_phase(rng)?;
        let sent = rng.random_range(0..self.constellation.len());
        let xhat = self.data_phase(&h, &hhat, self.constellation.symbols()[sent], rng)?;
        Ok(TrialOutcome {
            sent,
            detected: mdd(xhat, &self.expected)?,
            xhat,
        })
    }

    fn channel_phase(&self, rng: &mut SeededRng) -> Result<(CMatrix, CMatrix)> {
        let h = sample_cn01(rng, self.m, 1);
        let zp = sample_cn01(rng, self.m, self.pilot.tau());
        let hhat = match self.receiver {
            Receiver::OneBit => {
                let y = h
                    .matmul(&self.pilot.matrix().adjoint())?
                    .scale(self.rho.sqrt())
                    .add(&zp)?;
                self.estimator.apply(&quantize(&y, self.rho, 1))?
            }
            Receiver::Genie => h.clone(),
        };
        Ok((h, hhat))
    }

    fn data_phase(
        &self,
        h: &CMatrix,
        hhat: &CMatrix,
        s: Complex64,
        rng: &mut SeededRng,
    ) -> Result<Complex64> {
        let r = match self.receiver {
            Receiver::OneBit => uplink_receive(h, s, self.rho, rng)?,
            Receiver::Genie => {
                let gain = self.rho.sqrt() * s;
                let r = CMatrix::from_fn(h.rows(), 1, |i, _| h[(i, 0)] * gain + rng.cn01());
                return Ok(mrc_soft(hhat, &r)? * (self.m as f64 / h.frobenius_norm_sqr()));
            }
        };
        mrc_soft(hhat, &r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SerReport {
    pub ser: f64,
    pub errors: usize,
    pub trials: usize,
    /// Binomial standard error `sqrt(ser (1 - ser) / trials)`.
    pub std_error: f64,
}

/// Monte Carlo symbol error rate. Trial `i` uses stream `i` of `config.seed`,
/// so runs at different SNRs share channel and noise draws.
pub fn ser_simulate(
    config: &SystemConfig,
    p: &PilotMatrix,
    constellation: &Constellation,
    receiver: Receiver,
) -> Result<SerReport> {
    config.validate()?;
    if config.k != 1 || p.tau() != config.tau {
        return arg_err(format!(
            "SER simulation needs K = 1 and a pilot of length {}, got K = {} and tau = {}",
            config.tau,
            config.k,
            p.tau()
        ));
    }
    let chain = DetectionChain::new(p, config.rho, config.m, constellation, receiver)?;
    let outcomes = run_trials(config.seed, config.trials, |_, rng| chain.trial(rng));
    let mut errors = 0;
    for o in outcomes {
        let o = o?;
        errors += usize::from(o.sent != o.detected);
    }
    let n = config.trials as f64;
    let ser = errors as f64 / n;
    Ok(SerReport {
        ser,
        errors,
        trials: config.trials,
        std_error: (ser * (1.0 - ser) / n).sqrt(),
    })
}
