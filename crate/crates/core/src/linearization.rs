//! First- and second-order characterization of the exact bridge networks.
//!
//! The sensitivity matrix `W` (volt per Pa) is available both in closed form
//! and by central differences on the exact circuit; the two must agree. The
//! nominal scale factor `T0 = W H0` turns bridge voltages back into an
//! acceleration estimate.

use crate::bridge::{
    standard_configuration_with_r0, ConfigId, DeviationAssignment, DualBridge, ExcitationVoltage,
    PiezoCoefficients, StressPair, DEFAULT_R0,
};
use crate::error::{ConfigLabel, Error, Result};
use crate::linalg::{Mat2, Vec2};
use crate::mechanics::{nominal_stress_map, Acceleration, MechanicalParams, StressMap};

/// Stress step for all finite-difference stencils, in Pa.
pub const FD_STEP: f64 = 1e4;

/// `T0` is treated as singular when `|det| < SINGULAR_RATIO · ‖T0‖²_F`.
pub const SINGULAR_RATIO: f64 = 1e-18;

/// Bridge output voltages `(v1, v2)`.
pub type BridgeOutputs = Vec2;

/// `v = W σ` to first order; rows are bridges, columns are beam stresses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityMatrix {
    pub matrix: Mat2,
    pub config: Option<ConfigId>,
}

impl SensitivityMatrix {
    pub fn custom(matrix: Mat2) -> Self {
        Self {
            matrix,
            config: None,
        }
    }
}

/// Closed-form sensitivity matrices.
///
/// A is diagonal; B and D share the sum/difference form. C uses the
/// second row `[pi_l, -pi_t]`, which is what its wiring actually produces.
pub fn analytic_sensitivity(
    config: ConfigId,
    coeffs: &PiezoCoefficients,
    v_ex: ExcitationVoltage,
) -> SensitivityMatrix {
    let v = v_ex.volts();
    let k = coeffs.difference();
    let (pl, pt) = (coeffs.pi_l(), coeffs.pi_t());
    let matrix = match config {
        ConfigId::A => Mat2::diag(k, k).scale(v / 2.0),
        ConfigId::B | ConfigId::D => Mat2::new(k, -k, k, k).scale(v / 4.0),
        ConfigId::C => Mat2::new(pl, -pl, pl, -pt).scale(v / 2.0),
    };
    SensitivityMatrix {
        matrix,
        config: Some(config),
    }
}

/// `∂v_i/∂σ_j` at zero stress by central differences with step [`FD_STEP`].
pub fn numeric_linearize(
    dual: &DualBridge,
    coeffs: &PiezoCoefficients,
    v_ex: ExcitationVoltage,
) -> SensitivityMatrix {
    let f = |s1: f64, s2: f64| {
        dual.outputs(
            coeffs,
            StressPair::new(s1, s2),
            &DeviationAssignment::ZERO,
            v_ex,
        )
    };
    let d = FD_STEP;
    let col1 = (f(d, 0.0) - f(-d, 0.0)).scale(0.5 / d);
    let col2 = (f(0.0, d) - f(0.0, -d)).scale(0.5 / d);
    SensitivityMatrix {
        matrix: Mat2::new(col1.x, col2.x, col1.y, col2.y),
        config: Some(dual.config()),
    }
}

/// Nominal scale factor `T0` (volt per g) with its cached inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleFactor {
    t0: Mat2,
    inverse: Mat2,
    config: Option<ConfigId>,
}

impl ScaleFactor {
    pub fn from_matrix(t0: Mat2, config: Option<ConfigId>) -> Result<Self> {
        let det = t0.det();
        let singular =
            !det.is_finite() || det.abs() < SINGULAR_RATIO * t0.frobenius_squared() || det == 0.0;
        if singular {
            return Err(Error::SingularScaleFactor(ConfigLabel(config)));
        }
        let inverse = t0
            .inverse()
            .map_err(|_| Error::SingularScaleFactor(ConfigLabel(config)))?;
        Ok(Self {
            t0,
            inverse,
            config,
        })
    }

    pub fn matrix(&self) -> Mat2 {
        self.t0
    }

    pub fn inverse(&self) -> Mat2 {
        self.inverse
    }

    pub fn config(&self) -> Option<ConfigId> {
        self.config
    }
}

/// `T0 = W H0`.
pub fn nominal_scale_factor(w: &SensitivityMatrix, h0: &StressMap) -> Result<ScaleFactor> {
    ScaleFactor::from_matrix(w.matrix * h0.matrix(), w.config)
}

/// `ã = T0⁻¹ v`.
pub fn estimate_acceleration(t: &ScaleFactor, v: BridgeOutputs) -> Acceleration {
    t.inverse * v
}

/// Second-order response: `v_k ≈ (W σ)_k + σᵀ Q_k σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticResponse {
    pub q: [Mat2; 2],
}

impl QuadraticResponse {
    /// The second-order part `(σᵀQ₁σ, σᵀQ₂σ)`.
    pub fn evaluate(&self, stresses: StressPair) -> Vec2 {
        let s = stresses.as_vec();
        Vec2::new(self.q[0].quadratic_form(s), self.q[1].quadratic_form(s))
    }
}

/// Half-Hessians of both bridge outputs at zero stress.
///
/// Diagonal terms use the 3-point stencil, the cross term the 4-point one,
/// both with step [`FD_STEP`].
pub fn quadratic_response_fit(
    dual: &DualBridge,
    coeffs: &PiezoCoefficients,
    v_ex: ExcitationVoltage,
) -> QuadraticResponse {
    let f = |s1: f64, s2: f64| {
        dual.outputs(
            coeffs,
            StressPair::new(s1, s2),
            &DeviationAssignment::ZERO,
            v_ex,
        )
    };
    let d = FD_STEP;
    let f0 = f(0.0, 0.0);
    let d11 = (f(d, 0.0) - f0.scale(2.0) + f(-d, 0.0)).scale(0.5 / (d * d));
    let d22 = (f(0.0, d) - f0.scale(2.0) + f(0.0, -d)).scale(0.5 / (d * d));
    let d12 = (f(d, d) - f(d, -d) - f(-d, d) + f(-d, -d)).scale(0.125 / (d * d));
    QuadraticResponse {
        q: [
            Mat2::new(d11.x, d12.x, d12.x, d22.x),
            Mat2::new(d11.y, d12.y, d12.y, d22.y),
        ],
    }
}

/// One configuration wired up with its mechanics and nominal calibration.
///
/// `exact_outputs` runs the full circuit; `estimate` applies the nominal
/// linear calibration `T0⁻¹` to those outputs.
#[derive(Debug, Clone, Copy)]
pub struct SensorModel {
    pub dual: DualBridge,
    pub coeffs: PiezoCoefficients,
    pub v_ex: ExcitationVoltage,
    pub mech: MechanicalParams,
    pub h0: StressMap,
    pub w: SensitivityMatrix,
    pub scale: ScaleFactor,
}

impl SensorModel {
    pub fn new(
        config: ConfigId,
        mech: MechanicalParams,
        coeffs: PiezoCoefficients,
        v_ex: ExcitationVoltage,
    ) -> Result<Self> {
        Self::with_r0(config, mech, coeffs, v_ex, DEFAULT_R0)
    }

    pub fn with_r0(
        config: ConfigId,
        mech: MechanicalParams,
        coeffs: PiezoCoefficients,
        v_ex: ExcitationVoltage,
        r0: f64,
    ) -> Result<Self> {
        let dual = standard_configuration_with_r0(config, r0)?;
        let h0 = nominal_stress_map(&mech);
        let w = analytic_sensitivity(config, &coeffs, v_ex);
        let scale = nominal_scale_factor(&w, &h0)?;
        Ok(Self {
            dual,
            coeffs,
            v_ex,
            mech,
            h0,
            w,
            scale,
        })
    }

    pub fn exact_outputs(&self, a: Acceleration, dev: &DeviationAssignment) -> BridgeOutputs {
        self.dual
            .outputs(&self.coeffs, self.h0.apply(a), dev, self.v_ex)
    }

    pub fn estimate(&self, a: Acceleration, dev: &DeviationAssignment) -> Acceleration {
        estimate_acceleration(&self.scale, self.exact_outputs(a, dev))
    }
}
