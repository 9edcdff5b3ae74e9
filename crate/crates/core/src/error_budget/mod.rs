//! Error channels of the acceleration estimate: nonlinearity, offset and
//! noise. Stress-map deviations live in [`crate::mechanics`].

pub mod noise;
pub mod nonlinearity;
pub mod offset;
pub mod search;

pub use noise::{
    directional_noise, noise_psd_matrix, noise_unit, normalized_psd_matrix,
    optimize_sensitivity_angle, worst_case_noise, worst_case_normalized, AngleOptimum,
    NoisePsdMatrix, NoiseSpec,
};
pub use nonlinearity::{
    max_nonlinearity_over_direction, nonlinearity_error_analytic, nonlinearity_error_numeric,
    nonlinearity_error_quadratic,
};
pub use offset::{
    offset_variance_analytic, offset_variance_monte_carlo, DeviationMode, DeviationModel,
    MonteCarloEstimate,
};

use crate::bridge::{ConfigId, DeviationAssignment, PiezoCoefficients};
use crate::error::Result;
use crate::linearization::SensorModel;
use crate::mechanics::{Acceleration, MechanicalParams};

/// Estimation error split into its systematic and random parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorDecomposition {
    /// `T0⁻¹ v_exact(a) - a` without noise, g.
    pub delta_a: Acceleration,
    /// PSD matrix of the noise part `T0⁻¹ v_n`, g²/Hz.
    pub noise: NoisePsdMatrix,
}

pub fn decompose_error(
    config: ConfigId,
    mech: &MechanicalParams,
    coeffs: &PiezoCoefficients,
    spec: &NoiseSpec,
    a: Acceleration,
    deviations: &DeviationAssignment,
) -> Result<ErrorDecomposition> {
    let sensor = SensorModel::new(config, *mech, *coeffs, spec.v_ex())?;
    Ok(ErrorDecomposition {
        delta_a: sensor.estimate(a, deviations) - a,
        noise: noise_psd_matrix(config, mech, coeffs, spec)?,
    })
}
