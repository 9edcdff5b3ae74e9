//! Acceleration-to-stress maps of the two cantilever/proof-mass subsystems.

use std::f64::consts::FRAC_PI_2;

use crate::bridge::StressPair;
use crate::error::{invalid, Error, Result};
use crate::linalg::{Mat2, Vec2};

/// Distance kept from 0 and π/2 when validating a sensitivity angle, in rad.
pub const ANGLE_GUARD: f64 = 1e-6;

/// Acceleration `(a1, a2)` in g.
pub type Acceleration = Vec2;

/// Acceleration in polar form: magnitude in g, direction in rad.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polar {
    pub magnitude: f64,
    pub theta: f64,
}

impl Polar {
    pub const fn new(magnitude: f64, theta: f64) -> Self {
        Self { magnitude, theta }
    }

    pub fn to_cartesian(self) -> Acceleration {
        Vec2::unit(self.theta).scale(self.magnitude)
    }
}

/// Stress gain `h` (Pa/g) and sensitivity angle `alpha` (rad).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanicalParams {
    h: f64,
    alpha: f64,
}

impl MechanicalParams {
    pub fn new(h: f64, alpha: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(invalid(
                "stress gain h",
                format!("{h} Pa/g is not positive"),
            ));
        }
        check_alpha(alpha)?;
        Ok(Self { h, alpha })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.h, alpha)
    }
}

/// Rejects angles outside `(ANGLE_GUARD, π/2 - ANGLE_GUARD)`.
pub fn check_alpha(alpha: f64) -> Result<()> {
    let (min, max) = admissible_alpha();
    if alpha > min && alpha < max {
        Ok(())
    } else {
        Err(Error::SingularAngle { alpha, min, max })
    }
}

/// Open interval of admissible sensitivity angles.
pub fn admissible_alpha() -> (f64, f64) {
    (ANGLE_GUARD, FRAC_PI_2 - ANGLE_GUARD)
}

/// Linear map `σ = H a` from acceleration (g) to beam-base stress (Pa).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressMap(pub Mat2);

impl StressMap {
    pub fn matrix(&self) -> Mat2 {
        self.0
    }

    pub fn apply(&self, a: Acceleration) -> StressPair {
        (self.0 * a).into()
    }

    pub fn inverse(&self) -> Result<Mat2> {
        self.0.inverse()
    }

    pub fn perturbed(&self, dh: &StressPerturbation) -> StressMap {
        StressMap(self.0 + dh.0)
    }
}

/// Additive deviation ΔH of the stress map, in Pa/g.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StressPerturbation(pub Mat2);

/// `H0 = h [[cos α, sin α], [-cos α, sin α]]` for a symmetric die.
pub fn nominal_stress_map(params: &MechanicalParams) -> StressMap {
    let (s, c) = params.alpha.sin_cos();
    StressMap(Mat2::new(c, s, -c, s).scale(params.h))
}

pub fn stress_from_acceleration(h: &StressMap, a: Acceleration) -> StressPair {
    h.apply(a)
}

/// Acceleration error `H0⁻¹ ΔH a` caused by a stress-map deviation.
///
/// The result does not depend on the bridge configuration.
pub fn stress_deviation_error(
    h0: &StressMap,
    dh: &StressPerturbation,
    a: Acceleration,
) -> Result<Acceleration> {
    Ok(h0.inverse()? * (dh.0 * a))
}
