//! Per-configuration error budget and the tables behind each CLI command.

use std::f64::consts::PI;

use crate::bridge::{standard_configuration_with_r0, ConfigId};
use crate::error::Result;
use crate::error_budget::{
    max_nonlinearity_over_direction, noise_psd_matrix, nonlinearity_error_analytic,
    nonlinearity_error_numeric, offset_variance_analytic, offset_variance_monte_carlo,
    optimize_sensitivity_angle, worst_case_noise, worst_case_normalized, DeviationMode,
    MonteCarloEstimate,
};
use crate::linearization::{analytic_sensitivity, numeric_linearize};
use crate::mechanics::Polar;

use super::config::RunConfig;
use super::table::{Cell, Table};

/// Offset statistics for one correlation mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffsetEntry {
    pub mode: DeviationMode,
    /// Closed-form `⟨‖Δa‖²⟩`, g².
    pub analytic: f64,
    pub monte_carlo: MonteCarloEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigBudget {
    pub config: ConfigId,
    /// `max_θ ‖Δa‖` at `cfg.magnitude`, g.
    pub max_nonlinearity: f64,
    pub offsets: Vec<OffsetEntry>,
    /// Worst-direction noise PSD, g²/Hz.
    pub noise_worst: f64,
    /// The same in units of `S_R / [h V_ex (π_l - π_t)]²`.
    pub noise_worst_normalized: f64,
    pub alpha_opt: f64,
    /// Worst-direction PSD at `alpha_opt`, g²/Hz.
    pub s0: f64,
    pub s0_normalized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorBudget {
    pub entries: Vec<ConfigBudget>,
}

impl ErrorBudget {
    pub fn get(&self, config: ConfigId) -> Option<&ConfigBudget> {
        self.entries.iter().find(|e| e.config == config)
    }

    pub fn to_table(&self) -> Table {
        let mut columns: Vec<String> = vec!["config".into(), "max_nonlinearity".into()];
        for mode in DeviationMode::ALL {
            for suffix in ["analytic", "mc", "stderr"] {
                columns.push(format!(
                    "offset_{}_{suffix}",
                    mode.as_str().replace('-', "_")
                ));
            }
        }
        columns.extend(
            [
                "noise_worst",
                "noise_worst_norm",
                "alpha_opt",
                "s0",
                "s0_norm",
            ]
            .iter()
            .map(|s| s.to_string()),
        );
        let mut table = Table::new(columns);
        for e in &self.entries {
            let mut row: Vec<Cell> = vec![e.config.to_string().into(), e.max_nonlinearity.into()];
            for o in &e.offsets {
                row.extend(
                    [o.analytic, o.monte_carlo.mean, o.monte_carlo.std_error].map(Cell::Num),
                );
            }
            row.extend(
                [
                    e.noise_worst,
                    e.noise_worst_normalized,
                    e.alpha_opt,
                    e.s0,
                    e.s0_normalized,
                ]
                .map(Cell::Num),
            );
            table.push(row);
        }
        table
    }

    pub fn to_csv(&self) -> String {
        self.to_table().to_csv()
    }
}

/// Full four-channel summary for every configuration in `cfg`.
pub fn run_report(cfg: &RunConfig) -> Result<ErrorBudget> {
    let mech = cfg.mech()?;
    let spec = cfg.noise_spec()?;
    let mut entries = Vec::with_capacity(cfg.configs.len());
    for &id in &cfg.configs {
        let offsets = DeviationMode::ALL
            .iter()
            .map(|&mode| {
                let model = cfg.deviation_model(mode)?;
                Ok(OffsetEntry {
                    mode,
                    analytic: offset_variance_analytic(id, &mech, &cfg.coeffs, &model),
                    monte_carlo: offset_variance_monte_carlo(
                        id,
                        &mech,
                        &cfg.coeffs,
                        cfg.v_ex,
                        &model,
                        cfg.samples,
                        cfg.seed,
                    )?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let opt = optimize_sensitivity_angle(id, &cfg.coeffs, &spec, cfg.h)?;
        entries.push(ConfigBudget {
            config: id,
            max_nonlinearity: max_nonlinearity_over_direction(
                id,
                &mech,
                &cfg.coeffs,
                cfg.magnitude,
            ),
            offsets,
            noise_worst: worst_case_noise(id, &mech, &cfg.coeffs, &spec)?,
            noise_worst_normalized: worst_case_normalized(id, &mech, &cfg.coeffs)?,
            alpha_opt: opt.alpha,
            s0: opt.s0,
            s0_normalized: opt.s0_normalized,
        });
    }
    Ok(ErrorBudget { entries })
}

/// Numeric and closed-form sensitivity matrices per configuration.
pub fn linearize_table(cfg: &RunConfig) -> Result<Table> {
    let mut table = Table::new(
        [
            "config",
            "w11",
            "w12",
            "w21",
            "w22",
            "w11_closed",
            "w12_closed",
            "w21_closed",
            "w22_closed",
            "max_rel_diff",
        ]
        .map(String::from)
        .to_vec(),
    );
    for &id in &cfg.configs {
        let dual = standard_configuration_with_r0(id, cfg.r0)?;
        let num = numeric_linearize(&dual, &cfg.coeffs, cfg.v_ex).matrix;
        let ana = analytic_sensitivity(id, &cfg.coeffs, cfg.v_ex).matrix;
        let floor = 1e-12 * ana.frobenius();
        let mut row: Vec<Cell> = vec![id.to_string().into()];
        row.extend(num.m.iter().flatten().map(|&v| Cell::Num(v)));
        row.extend(ana.m.iter().flatten().map(|&v| Cell::Num(v)));
        row.push(num.max_relative_diff(&ana, floor).into());
        table.push(row);
    }
    Ok(table)
}

/// Worst-direction nonlinearity and the agreement of the exact-network
/// extraction with the closed form over 32 directions.
pub fn nonlinearity_table(cfg: &RunConfig) -> Result<Table> {
    let mech = cfg.mech()?;
    let mut table = Table::new(
        [
            "config",
            "alpha",
            "magnitude",
            "max_nonlinearity",
            "oracle_max_rel_diff",
        ]
        .map(String::from)
        .to_vec(),
    );
    for &id in &cfg.configs {
        let mut worst: f64 = 0.0;
        for k in 0..32 {
            let a = Polar::new(cfg.magnitude, 2.0 * PI * k as f64 / 32.0);
            let ana = nonlinearity_error_analytic(id, &mech, &cfg.coeffs, a);
            let num = nonlinearity_error_numeric(id, &mech, &cfg.coeffs, cfg.v_ex, a)?;
            if ana.norm() > 0.0 {
                worst = worst.max((num - ana).norm() / ana.norm());
            }
        }
        table.push(vec![
            id.to_string().into(),
            cfg.alpha.into(),
            cfg.magnitude.into(),
            max_nonlinearity_over_direction(id, &mech, &cfg.coeffs, cfg.magnitude).into(),
            worst.into(),
        ]);
    }
    Ok(table)
}

/// Closed-form and Monte Carlo offset variance for `cfg.deviation_mode`.
pub fn offset_table(cfg: &RunConfig) -> Result<Table> {
    let mech = cfg.mech()?;
    let model = cfg.deviation_model(cfg.deviation_mode)?;
    let mut table = Table::new(
        ["config", "mode", "delta", "analytic", "mc", "stderr", "z"]
            .map(String::from)
            .to_vec(),
    );
    for &id in &cfg.configs {
        let analytic = offset_variance_analytic(id, &mech, &cfg.coeffs, &model);
        let mc = offset_variance_monte_carlo(
            id,
            &mech,
            &cfg.coeffs,
            cfg.v_ex,
            &model,
            cfg.samples,
            cfg.seed,
        )?;
        table.push(vec![
            id.to_string().into(),
            model.mode().as_str().into(),
            cfg.delta.into(),
            analytic.into(),
            mc.mean.into(),
            mc.std_error.into(),
            mc.z_score(analytic).into(),
        ]);
    }
    Ok(table)
}

/// Noise PSD matrix entries and directional extremes.
pub fn noise_table(cfg: &RunConfig) -> Result<Table> {
    let mech = cfg.mech()?;
    let spec = cfg.noise_spec()?;
    let mut table = Table::new(
        [
            "config",
            "s11",
            "s12",
            "s22",
            "min_dir",
            "max_dir",
            "max_dir_norm",
        ]
        .map(String::from)
        .to_vec(),
    );
    for &id in &cfg.configs {
        let s = noise_psd_matrix(id, &mech, &cfg.coeffs, &spec)?;
        let (lo, hi) = s.extremes();
        let m = s.matrix();
        table.push(vec![
            id.to_string().into(),
            m.get(0, 0).into(),
            m.get(0, 1).into(),
            m.get(1, 1).into(),
            lo.into(),
            hi.into(),
            worst_case_normalized(id, &mech, &cfg.coeffs)?.into(),
        ]);
    }
    Ok(table)
}

/// Optimal sensitivity angle per configuration.
pub fn optimize_table(cfg: &RunConfig) -> Result<Table> {
    let spec = cfg.noise_spec()?;
    let mut table = Table::new(
        ["config", "alpha_opt", "alpha_opt_over_pi", "s0", "s0_norm"]
            .map(String::from)
            .to_vec(),
    );
    for &id in &cfg.configs {
        let opt = optimize_sensitivity_angle(id, &cfg.coeffs, &spec, cfg.h)?;
        table.push(vec![
            id.to_string().into(),
            opt.alpha.into(),
            (opt.alpha / PI).into(),
            opt.s0.into(),
            opt.s0_normalized.into(),
        ]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        RunConfig {
            samples: 2000,
            ..RunConfig::default()
        }
    }

    #[test]
    fn report_has_every_config_and_column() {
        let budget = run_report(&small()).unwrap();
        assert_eq!(budget.entries.len(), 4);
        let table = budget.to_table();
        assert_eq!(table.columns.len(), 2 + 9 + 5);
        assert!(table.rows.iter().all(|r| r.len() == table.columns.len()));
    }

    #[test]
    fn linearize_table_agrees() {
        let t = linearize_table(&RunConfig::default()).unwrap();
        for v in t.column("max_rel_diff").unwrap() {
            assert!(v < 1e-6);
        }
    }

    #[test]
    fn offset_table_uses_configured_mode() {
        let cfg = RunConfig {
            deviation_mode: DeviationMode::PerOrientation,
            samples: 1000,
            configs: vec![ConfigId::A],
            ..RunConfig::default()
        };
        let t = offset_table(&cfg).unwrap();
        assert_eq!(t.rows[0][1], Cell::Text("per-orientation".into()));
    }
}
