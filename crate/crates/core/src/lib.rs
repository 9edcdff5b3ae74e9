//! Error budgets for the Wheatstone-bridge configurations of two-proof-mass
//! piezoresistive two-axis accelerometers.
//!
//! The crate models each of the four standard bridge configurations (A-D) as
//! an exact resistor network and derives, both in closed form and through
//! independent numerical routes:
//!
//! - the linear sensitivity `W` and nominal scale factor `T0 = W H0`
//!   ([`linearization`]),
//! - the error from stress-map deviations ([`mechanics`]),
//! - bridge nonlinearity, offset statistics under resistor mismatch and the
//!   acceleration-noise spectral density ([`error_budget`]),
//! - figure sweeps and summary reports written as CSV ([`report`]).
//!
//! ```
//! use piezobridge_core::{ConfigId, ExcitationVoltage, PiezoCoefficients};
//! use piezobridge_core::linearization::{analytic_sensitivity, numeric_linearize};
//! use piezobridge_core::bridge::standard_configuration;
//!
//! let coeffs = PiezoCoefficients::P_TYPE_SILICON;
//! let v_ex = ExcitationVoltage::new(1.0).unwrap();
//! let numeric = numeric_linearize(&standard_configuration(ConfigId::B), &coeffs, v_ex);
//! let closed = analytic_sensitivity(ConfigId::B, &coeffs, v_ex);
//! assert!(numeric.matrix.max_relative_diff(&closed.matrix, 1e-20) < 1e-6);
//! ```

pub mod bridge;
pub mod error;
pub mod error_budget;
pub mod linalg;
pub mod linearization;
pub mod mechanics;
pub mod report;

pub use bridge::{
    ConfigId, DeviationAssignment, DualBridge, ExcitationVoltage, PiezoCoefficients, StressPair,
};
pub use error::{Error, Result};
pub use error_budget::{DeviationMode, DeviationModel, NoisePsdMatrix, NoiseSpec};
pub use linalg::{Mat2, Vec2};
pub use linearization::{ScaleFactor, SensitivityMatrix, SensorModel};
pub use mechanics::{Acceleration, MechanicalParams, Polar, StressMap, StressPerturbation};
