use super::report::OracleReport;
use super::stats::SampleMoments;
use crate::chest::{
    mse_blm_closed, mse_sls_closed, mse_sls_mol, mse_sls_opt, EstimatorKind, LinearEstimator,
};
use crate::config::{linear_to_db, SystemConfig};
use crate::error::{arg_err, Error, Result};
use crate::pilots::PilotMatrix;
use crate::quant::quantize;
use crate::rng::{run_trials, sample_cn01};

/// Closed-form MSE of an estimator kind.
pub fn mse_closed_form(kind: EstimatorKind, p: &PilotMatrix, rho: f64) -> Result<f64> {
    match kind {
        EstimatorKind::BlmFull => {
            if !p.circulant_gram() {
                return Err(Error::Precondition(
                    "closed-form MSE of the full Bussgang estimator requires a circulant pilot Gram matrix".into(),
                ));
            }
            mse_blm_closed(p, rho)
        }
        EstimatorKind::BlmSimplified => mse_blm_closed(p, rho),
        EstimatorKind::SlsMol => mse_sls_mol(p, rho),
        EstimatorKind::SlsOpt => mse_sls_opt(p, rho),
        EstimatorKind::SlsCustom(psi) => mse_sls_closed(p, rho, Some(psi)),
    }
}

fn check_shapes(config: &SystemConfig, p: &PilotMatrix) -> Result<()> {
    config.validate()?;
    if p.tau() != config.tau || p.k() != config.k {
        return arg_err(format!(
            "pilot is {} x {} but the configuration has tau = {}, K = {}",
            p.tau(),
            p.k(),
            config.tau,
            config.k
        ));
    }
    Ok(())
}

/// Monte Carlo `(1 / MK) E|H_hat - H|^2` against the closed form.
pub fn empirical_mse(
    kind: EstimatorKind,
    config: &SystemConfig,
    p: &PilotMatrix,
) -> Result<OracleReport> {
    Ok(empirical_mse_many(&[kind], config, p)?.remove(0))
}

/// Like [`empirical_mse`] for several estimators evaluated on the same
/// channel and noise draws.
pub fn empirical_mse_many(
    kinds: &[EstimatorKind],
    config: &SystemConfig,
    p: &PilotMatrix,
) -> Result<Vec<OracleReport>> {
    check_shapes(config, p)?;
    let rho = config.rho;
    let closed = kinds
        .iter()
        .map(|&k| mse_closed_form(k, p, rho))
        .collect::<Result<Vec<_>>>()?;
    let estimators = kinds
        .iter()
        .map(|&k| LinearEstimator::new(k, p, rho))
        .collect::<Result<Vec<_>>>()?;
    let (m, k) = (config.m, config.k);
    let norm = (m * k) as f64;
    let ph = p.matrix().adjoint();

    let per_trial = run_trials(config.seed, config.trials, |_, rng| -> Result<Vec<f64>> {
        let h = sample_cn01(rng, m, k);
        let zp = sample_cn01(rng, m, config.tau);
        let rp = quantize(&h.matmul(&ph)?.scale(rho.sqrt()).add(&zp)?, rho, k);
        estimators
            .iter()
            .map(|e| Ok(e.apply(&rp)?.sub(&h)?.frobenius_norm_sqr() / norm))
            .collect()
    });
    let per_trial = per_trial.into_iter().collect::<Result<Vec<_>>>()?;

    Ok(kinds
        .iter()
        .enumerate()
        .map(|(i, kind)| {
            let errs: Vec<f64> = per_trial.iter().map(|row| row[i]).collect();
            let mom = SampleMoments::of_real(&errs);
            OracleReport::sigma3(
                format!(
                    "mse {} K={} tau={} M={} rho={:.1}dB",
                    kind.label(),
                    k,
                    config.tau,
                    m,
                    linear_to_db(rho)
                ),
                closed[i],
                mom.mean.re,
                mom.se_mean(),
                config.trials,
            )
        })
        .collect())
}
