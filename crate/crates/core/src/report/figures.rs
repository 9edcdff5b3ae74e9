//! Sweeps behind the nonlinearity and noise figures.
//!
//! | figure | sweep | quantity |
//! |--------|-------|----------|
//! | 3 | θ over [0, 2π] | `‖Δa(θ)‖` in g at `cfg.alpha` |
//! | 4 | α over `[alpha_min, alpha_max]` | `max_θ ‖Δa‖` in g |
//! | 5 | θ over [0, 2π] | normalized `S(θ)` at `cfg.alpha` |
//! | 6 | θ over [0, 2π] | normalized `S(θ)` at α = 0.4π |
//! | 7 | α over `[alpha_min, alpha_max]` | normalized `max_θ S(θ)` |
//!
//! Noise columns are in units of `S_R / [h V_ex (π_l - π_t)]²`.

use std::f64::consts::{PI, TAU};

use crate::bridge::ConfigId;
use crate::error::{invalid, Result};
use crate::error_budget::{
    directional_noise, max_nonlinearity_over_direction, nonlinearity_error_analytic,
    normalized_psd_matrix, worst_case_normalized,
};
use crate::mechanics::{MechanicalParams, Polar};

use super::config::RunConfig;
use super::table::{Cell, SweepResult, Table};

/// Sensitivity angle used by figure 6.
pub const STEEP_ALPHA: f64 = 0.4 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Nonlinearity,
    MaxNonlinearity,
    Noise,
    NoiseSteep,
    MaxNoise,
}

impl Figure {
    pub fn from_number(n: u32) -> Result<Self> {
        match n {
            3 => Ok(Figure::Nonlinearity),
            4 => Ok(Figure::MaxNonlinearity),
            5 => Ok(Figure::Noise),
            6 => Ok(Figure::NoiseSteep),
            7 => Ok(Figure::MaxNoise),
            other => Err(invalid(
                "figure",
                format!("{other} is not one of 3, 4, 5, 6, 7"),
            )),
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(move |i| if i + 1 == n { hi } else { lo + step * i as f64 })
}

fn columns(first: &str, prefix: &str, configs: &[ConfigId]) -> Vec<String> {
    std::iter::once(first.to_string())
        .chain(configs.iter().map(|c| format!("{prefix}{c}")))
        .collect()
}

pub fn reproduce_figure(n: u32, cfg: &RunConfig) -> Result<SweepResult> {
    let figure = Figure::from_number(n)?;
    let coeffs = cfg.coeffs;
    match figure {
        Figure::Nonlinearity => {
            let mech = cfg.mech()?;
            let mut table = Table::new(columns("theta", "dA_", &cfg.configs));
            for theta in linspace(0.0, TAU, cfg.theta_points) {
                let mut row: Vec<Cell> = vec![theta.into()];
                for &id in &cfg.configs {
                    let d = nonlinearity_error_analytic(
                        id,
                        &mech,
                        &coeffs,
                        Polar::new(cfg.magnitude, theta),
                    );
                    row.push(d.norm().into());
                }
                table.push(row);
            }
            Ok(table)
        }
        Figure::MaxNonlinearity => alpha_sweep(cfg, "max_dA_", |id, mech| {
            Ok(max_nonlinearity_over_direction(
                id,
                mech,
                &coeffs,
                cfg.magnitude,
            ))
        }),
        Figure::Noise | Figure::NoiseSteep => {
            let alpha = if figure == Figure::Noise {
                cfg.alpha
            } else {
                STEEP_ALPHA
            };
            let mech = MechanicalParams::new(cfg.h, alpha)?;
            let matrices = cfg
                .configs
                .iter()
                .map(|&id| normalized_psd_matrix(id, &mech, &coeffs))
                .collect::<Result<Vec<_>>>()?;
            let mut table = Table::new(columns("theta", "S_", &cfg.configs));
            for theta in linspace(0.0, TAU, cfg.theta_points) {
                let mut row: Vec<Cell> = vec![theta.into()];
                row.extend(
                    matrices
                        .iter()
                        .map(|s| Cell::Num(directional_noise(s, theta))),
                );
                table.push(row);
            }
            Ok(table)
        }
        Figure::MaxNoise => alpha_sweep(cfg, "max_S_", |id, mech| {
            worst_case_normalized(id, mech, &coeffs)
        }),
    }
}

fn alpha_sweep(
    cfg: &RunConfig,
    prefix: &str,
    f: impl Fn(ConfigId, &MechanicalParams) -> Result<f64>,
) -> Result<SweepResult> {
    let mut table = Table::new(columns("alpha", prefix, &cfg.configs));
    for alpha in linspace(cfg.alpha_min, cfg.alpha_max, cfg.alpha_points) {
        let mech = MechanicalParams::new(cfg.h, alpha)?;
        let mut row: Vec<Cell> = vec![alpha.into()];
        for &id in &cfg.configs {
            row.push(f(id, &mech)?.into());
        }
        table.push(row);
    }
    Ok(table)
}
