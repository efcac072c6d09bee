use num_complex::Complex64;

use super::report::{real, OracleReport, Tolerance};
use super::stats::SampleMoments;
use crate::config::{linear_to_db, SystemConfig};
use crate::detect::{Constellation, DetectionChain, Receiver, SymbolModel};
use crate::error::{arg_err, Result};
use crate::pilots::PilotMatrix;
use crate::rng::run_trials;

fn chain_for(config: &SystemConfig, p: &PilotMatrix) -> Result<DetectionChain> {
    config.validate()?;
    if config.k != 1 || p.tau() != config.tau {
        return arg_err(format!(
            "symbol statistics need K = 1 and a pilot of length {}, got K = {} and tau = {}",
            config.tau,
            config.k,
            p.tau()
        ));
    }
    DetectionChain::new(
        p,
        config.rho,
        config.m,
        &Constellation::qpsk(),
        Receiver::OneBit,
    )
}

/// `config.trials` independent soft estimates of `s` from the full 1-bit chain.
pub fn sample_xhat(s: Complex64, config: &SystemConfig, p: &PilotMatrix) -> Result<Vec<Complex64>> {
    let chain = chain_for(config, p)?;
    run_trials(config.seed, config.trials, |_, rng| {
        chain.sample_xhat(s, rng)
    })
    .into_iter()
    .collect()
}

fn tag(s: Complex64, config: &SystemConfig) -> String {
    format!(
        "s={:.4}{:+.4}i M={} tau={} rho={:.1}dB",
        s.re,
        s.im,
        config.m,
        config.tau,
        linear_to_db(config.rho)
    )
}

/// Sample mean and variance of the soft estimate against their closed forms.
/// The mean passes when each component is within `3 sqrt(V / N)`; the
/// variance within 5% relative.
pub fn empirical_symbol_stats(
    s: Complex64,
    config: &SystemConfig,
    p: &PilotMatrix,
) -> Result<(OracleReport, OracleReport)> {
    let xs = sample_xhat(s, config, p)?;
    let stats = SymbolModel::new(p, config.rho, config.m)?.stats(s)?;
    let mom = SampleMoments::of(&xs);
    let n = xs.len();
    let mean = OracleReport::new(
        format!("symbol mean {}", tag(s, config)),
        stats.expected,
        mom.mean,
        mom.se_mean_total(),
        n,
        Tolerance::Sigma(3.0),
    );
    let var = OracleReport::new(
        format!("symbol variance {}", tag(s, config)),
        real(stats.variance),
        real(mom.variance),
        mom.se_variance(),
        n,
        Tolerance::Relative(0.05),
    );
    Ok((mean, var))
}

/// Sample normalized variance `V / |E|^2` against a supplied closed form.
pub fn empirical_normvar(
    name: impl Into<String>,
    closed_form: f64,
    s: Complex64,
    config: &SystemConfig,
    p: &PilotMatrix,
) -> Result<OracleReport> {
    let xs = sample_xhat(s, config, p)?;
    let mom = SampleMoments::of(&xs);
    let e2 = mom.mean.norm_sqr();
    Ok(OracleReport::new(
        name,
        real(closed_form),
        real(mom.variance / e2),
        mom.se_variance() / e2,
        xs.len(),
        Tolerance::Relative(0.05),
    ))
}
