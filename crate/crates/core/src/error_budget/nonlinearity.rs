//! Bridge nonlinearity: the leading quadratic error of the linear estimator.

use std::f64::consts::TAU;

use crate::bridge::{ConfigId, DeviationAssignment, ExcitationVoltage, PiezoCoefficients};
use crate::error::Result;
use crate::linalg::Vec2;
use crate::linearization::{estimate_acceleration, quadratic_response_fit, SensorModel};
use crate::mechanics::{Acceleration, MechanicalParams, Polar};

use super::search::scan_max;

/// Grid size of the direction scan in [`max_nonlinearity_over_direction`].
pub const DIRECTION_GRID: usize = 720;

/// Closed-form leading-order error `Δa` in g.
///
/// With `c∓ = cos²(θ ∓ α)`:
/// A, B, D: `-(h|a|²/4)(π_l+π_t) [(c₋ - c₊)/cos α, (c₋ + c₊)/sin α]`;
/// C: `-(h|a|²/4) [π_l (c₋ - c₊)/cos α, (π_l c₋ + (π_l + 2π_t) c₊)/sin α]`.
pub fn nonlinearity_error_analytic(
    config: ConfigId,
    mech: &MechanicalParams,
    coeffs: &PiezoCoefficients,
    a: Polar,
) -> Acceleration {
    let alpha = mech.alpha();
    let (sa, ca) = alpha.sin_cos();
    let prefactor = -mech.h() * a.magnitude * a.magnitude / 4.0;
    let minus = (a.theta - alpha).cos().powi(2);
    let plus = (a.theta + alpha).cos().powi(2);
    let (pl, pt) = (coeffs.pi_l(), coeffs.pi_t());
    match config {
        ConfigId::A | ConfigId::B | ConfigId::D => {
            Vec2::new((minus - plus) / ca, (minus + plus) / sa).scale(prefactor * coeffs.sum())
        }
        ConfigId::C => Vec2::new(
            pl * (minus - plus) / ca,
            (pl * minus + (pl + 2.0 * pt) * plus) / sa,
        )
        .scale(prefactor),
    }
}

/// Even part of the exact-pipeline error, `(Δa(a) + Δa(-a)) / 2` with
/// `Δa(a) = T0⁻¹ v_exact(a) - a`.
pub fn nonlinearity_error_numeric(
    config: ConfigId,
    mech: &MechanicalParams,
    coeffs: &PiezoCoefficients,
    v_ex: ExcitationVoltage,
    a: Polar,
) -> Result<Acceleration> {
    let model = SensorModel::new(config, *mech, *coeffs, v_ex)?;
    Ok(even_error(&model, a.to_cartesian()))
}

pub(crate) fn even_error(model: &SensorModel, a: Acceleration) -> Acceleration {
    let dev = DeviationAssignment::ZERO;
    let plus = model.estimate(a, &dev) - a;
    let minus = model.estimate(-a, &dev) + a;
    (plus + minus).scale(0.5)
}

/// Quadratic error from the fitted second-order response, `T0⁻¹ (σᵀQσ)`.
pub fn nonlinearity_error_quadratic(
    config: ConfigId,
    mech: &MechanicalParams,
    coeffs: &PiezoCoefficients,
    v_ex: ExcitationVoltage,
    a: Polar,
) -> Result<Acceleration> {
    let model = SensorModel::new(config, *mech, *coeffs, v_ex)?;
    let response = quadratic_response_fit(&model.dual, coeffs, v_ex);
    let stresses = model.h0.apply(a.to_cartesian());
    Ok(estimate_acceleration(
        &model.scale,
        response.evaluate(stresses),
    ))
}

/// `max_θ ‖Δa(θ)‖` from the closed forms.
pub fn max_nonlinearity_over_direction(
    config: ConfigId,
    mech: &MechanicalParams,
    coeffs: &PiezoCoefficients,
    magnitude: f64,
) -> f64 {
    let norm = |theta: f64| {
        nonlinearity_error_analytic(config, mech, coeffs, Polar::new(magnitude, theta)).norm()
    };
    scan_max(norm, 0.0, TAU, DIRECTION_GRID, true, 1e-10).value
}
