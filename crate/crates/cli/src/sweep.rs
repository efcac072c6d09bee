//! One runner per subcommand, each producing a [`Table`].

use onebit_core::chest::{
    mse_asymptotic, mse_bound_ones, mse_bound_ones_lim_rho, mse_bound_ones_lim_tau,
    rho_star_residual, solve_rho_star, MseKind,
};
use onebit_core::detect::{
    normvar_bound_ones, normvar_bound_ones_lim_rho, ser_simulate, symbol_stats_asymptotic,
    Receiver, SymbolModel,
};
use onebit_core::oracle::{
    empirical_mse_many, mse_closed_form, sample_xhat, validation_suite, SampleMoments,
};
use onebit_core::{db_to_linear, linear_to_db, EstimatorKind, PilotMatrix, SystemConfig};

use crate::error::{CliError, CliResult};
use crate::params::{Axis, Command, SweepParams};
use crate::table::{Cell, Table};

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Builds the table for `params`. `validate` returns its table together with
/// the failure count so the caller can still write the CSV.
pub fn run(params: &SweepParams) -> CliResult<(Table, usize)> {
    match params.command {
        Command::MseVsRho | Command::MseVsTau => mse_sweep(params).map(|t| (t, 0)),
        Command::RhoStar => rho_star(params).map(|t| (t, 0)),
        Command::DetectScatter => detect_scatter(params).map(|t| (t, 0)),
        Command::VarVsM | Command::VarVsRho | Command::VarVsTau => {
            var_sweep(params).map(|t| (t, 0))
        }
        Command::SerVsRho => ser_sweep(params).map(|t| (t, 0)),
        Command::Validate => validate(params),
    }
}

/// `(rho_db, tau, m)` for each grid point.
fn points(params: &SweepParams) -> Vec<(f64, usize, usize)> {
    params
        .grid
        .iter()
        .map(|&g| match params.command.axis() {
            Axis::RhoDb => (g, params.tau, params.m),
            Axis::Tau => (params.rho_db, g as usize, params.m),
            Axis::M => (params.rho_db, params.tau, g as usize),
            Axis::None => (params.rho_db, params.tau, params.m),
        })
        .collect()
}

/// Drops defaulted estimators whose closed form needs a circulant Gram.
fn estimators_for(params: &SweepParams, p: &PilotMatrix) -> Vec<EstimatorKind> {
    if params.estimators_given || p.circulant_gram() {
        return params.estimators.clone();
    }
    log::warn!(
        "{} pilots are not circulant; skipping blm-full",
        params.pilot
    );
    params
        .estimators
        .iter()
        .copied()
        .filter(|k| *k != EstimatorKind::BlmFull)
        .collect()
}

fn mse_sweep(params: &SweepParams) -> CliResult<Table> {
    let probe = params.pilot.build(points(params)[0].1, params.k)?;
    let kinds = estimators_for(params, &probe);
    let empirical = params.trials > 0;
    let single = params.k == 1;

    let mut header = cols(&["rho_db", "rho", "k", "tau", "m"]);
    for kind in &kinds {
        let l = kind.label();
        header.push(format!("mse_{l}_closed"));
        if empirical {
            header.push(format!("mse_{l}_empirical"));
            header.push(format!("mse_{l}_se"));
        }
    }
    header.extend(cols(&[
        "mse_blm_asymptotic",
        "mse_sls_asymptotic",
        "mse_sls_opt_asymptotic",
    ]));
    if single {
        header.extend(cols(&[
            "mse_bound_ones_blm",
            "mse_bound_ones_sls",
            "mse_bound_ones_blm_lim_rho",
            "mse_bound_ones_sls_lim_rho",
            "mse_bound_ones_blm_lim_tau",
            "mse_bound_ones_sls_lim_tau",
        ]));
    }
    let mut table = Table::new(header);

    for (db, tau, m) in points(params) {
        let rho = db_to_linear(db);
        let p = params.pilot.build(tau, params.k)?;
        let mut row: Vec<Cell> = vec![db.into(), rho.into(), params.k.into(), tau.into(), m.into()];
        let reports = if empirical {
            let cfg = SystemConfig::new(m, params.k, tau, rho, params.trials, params.seed)?;
            Some(empirical_mse_many(&kinds, &cfg, &p)?)
        } else {
            None
        };
        for (i, &kind) in kinds.iter().enumerate() {
            row.push(mse_closed_form(kind, &p, rho)?.into());
            if let Some(rs) = &reports {
                row.push(rs[i].empirical.re.into());
                row.push(rs[i].std_error.into());
            }
        }
        for mk in [MseKind::Blm, MseKind::Sls, MseKind::SlsOpt] {
            row.push(mse_asymptotic(mk, &p)?.into());
        }
        if single {
            for mk in [MseKind::Blm, MseKind::Sls] {
                row.push(mse_bound_ones(mk, rho, tau)?.into());
            }
            for mk in [MseKind::Blm, MseKind::Sls] {
                row.push(mse_bound_ones_lim_rho(mk, tau)?.into());
            }
            for mk in [MseKind::Blm, MseKind::Sls] {
                row.push(mse_bound_ones_lim_tau(mk, rho)?.into());
            }
        }
        table.push(row);
    }
    Ok(table)
}

fn rho_star(params: &SweepParams) -> CliResult<Table> {
    let mut table = Table::new(cols(&[
        "tau",
        "rho_star",
        "rho_star_db",
        "residual",
        "mse_bound_ones_blm_at_rho_star",
    ]));
    for &t in &params.grid {
        let tau = t as usize;
        let r = solve_rho_star(tau)?;
        table.push(vec![
            tau.into(),
            r.into(),
            linear_to_db(r).into(),
            rho_star_residual(r, tau).into(),
            mse_bound_ones(MseKind::Blm, r, tau)?.into(),
        ]);
    }
    Ok(table)
}

fn detect_scatter(params: &SweepParams) -> CliResult<Table> {
    let constellation = params.constellation.build();
    let mut table = Table::new(cols(&[
        "rho_db",
        "rho",
        "symbol",
        "s_re",
        "s_im",
        "expected_re",
        "expected_im",
        "xhat_re",
        "xhat_im",
    ]));
    for (db, tau, m) in points(params) {
        let rho = db_to_linear(db);
        let p = params.pilot.build(tau, 1)?;
        let model = SymbolModel::new(&p, rho, m)?;
        let cfg = SystemConfig::new(m, 1, tau, rho, params.trials, params.seed)?;
        for (i, &s) in constellation.symbols().iter().enumerate() {
            let e = model.expected(s)?;
            for x in sample_xhat(s, &cfg, &p)? {
                table.push(vec![
                    db.into(),
                    rho.into(),
                    i.into(),
                    s.re.into(),
                    s.im.into(),
                    e.re.into(),
                    e.im.into(),
                    x.re.into(),
                    x.im.into(),
                ]);
            }
        }
    }
    Ok(table)
}

fn var_sweep(params: &SweepParams) -> CliResult<Table> {
    let constellation = params.constellation.build();
    let empirical = params.trials > 0;
    let asymptotic = params.command == Command::VarVsRho;
    let mut header = cols(&[
        "m",
        "tau",
        "rho_db",
        "rho",
        "symbol",
        "s_re",
        "s_im",
        "expected_re",
        "expected_im",
        "variance",
        "normvar",
        "normvar_bound_ones",
    ]);
    if asymptotic {
        header.extend(cols(&["normvar_asymptotic", "normvar_bound_ones_lim_rho"]));
    }
    if empirical {
        header.extend(cols(&[
            "mean_re_empirical",
            "mean_im_empirical",
            "mean_se",
            "variance_empirical",
            "variance_se",
            "normvar_empirical",
            "normvar_se",
        ]));
    }
    let mut table = Table::new(header);

    for (db, tau, m) in points(params) {
        let rho = db_to_linear(db);
        let p = params.pilot.build(tau, 1)?;
        let model = SymbolModel::new(&p, rho, m)?;
        for (i, &s) in constellation.symbols().iter().enumerate() {
            let st = model.stats(s)?;
            let nv = st.normalized_variance.ok_or_else(|| {
                CliError::Usage(format!(
                    "symbol {s} has a zero mean; normalized variance undefined"
                ))
            })?;
            let mut row: Vec<Cell> = vec![
                m.into(),
                tau.into(),
                db.into(),
                rho.into(),
                i.into(),
                s.re.into(),
                s.im.into(),
                st.expected.re.into(),
                st.expected.im.into(),
                st.variance.into(),
                nv.into(),
                normvar_bound_ones(s, rho, tau, m)?.into(),
            ];
            if asymptotic {
                let lim = symbol_stats_asymptotic(s, &p, m)?;
                row.push(lim.normalized_variance.unwrap_or(f64::NAN).into());
                row.push(normvar_bound_ones_lim_rho(s, m)?.into());
            }
            if empirical {
                let cfg = SystemConfig::new(m, 1, tau, rho, params.trials, params.seed)?;
                let mom = SampleMoments::of(&sample_xhat(s, &cfg, &p)?);
                let e2 = mom.mean.norm_sqr();
                row.extend([
                    mom.mean.re.into(),
                    mom.mean.im.into(),
                    mom.se_mean_total().into(),
                    mom.variance.into(),
                    mom.se_variance().into(),
                    (mom.variance / e2).into(),
                    (mom.se_variance() / e2).into(),
                ]);
            }
            table.push(row);
        }
    }
    Ok(table)
}

fn ser_sweep(params: &SweepParams) -> CliResult<Table> {
    let constellation = params.constellation.build();
    let mut table = Table::new(cols(&[
        "rho_db", "rho", "m", "tau", "ser", "ser_se", "errors", "trials",
    ]));
    for (db, tau, m) in points(params) {
        let rho = db_to_linear(db);
        let p = params.pilot.build(tau, 1)?;
        let cfg = SystemConfig::new(m, 1, tau, rho, params.trials, params.seed)?;
        let r = ser_simulate(&cfg, &p, &constellation, Receiver::OneBit)?;
        log::info!("ser at {db} dB: {:.5}", r.ser);
        table.push(vec![
            db.into(),
            rho.into(),
            m.into(),
            tau.into(),
            r.ser.into(),
            r.std_error.into(),
            r.errors.into(),
            r.trials.into(),
        ]);
    }
    Ok(table)
}

fn validate(params: &SweepParams) -> CliResult<(Table, usize)> {
    let reports = validation_suite(params.trials, params.seed)?;
    let mut table = Table::new(cols(&[
        "name",
        "closed_re",
        "closed_im",
        "empirical_re",
        "empirical_im",
        "std_error",
        "n_trials",
        "tolerance",
        "pass",
    ]));
    let mut failed = 0;
    for r in &reports {
        if !r.pass {
            failed += 1;
            log::error!("{r}");
        }
        table.push(vec![
            r.name.as_str().into(),
            r.closed_form.re.into(),
            r.closed_form.im.into(),
            r.empirical.re.into(),
            r.empirical.im.into(),
            r.std_error.into(),
            r.n_trials.into(),
            r.tolerance.to_string().into(),
            r.pass.into(),
        ]);
    }
    Ok((table, failed))
}
