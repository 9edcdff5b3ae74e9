use thiserror::Error;

use crate::bridge::ConfigId;

/// Errors raised by the modeling and error-budget routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(
        "sensitivity angle {alpha} rad is outside ({min}, {max}); the stress map is singular there"
    )]
    SingularAngle { alpha: f64, min: f64, max: f64 },

    #[error("matrix is singular (det = {det:e})")]
    SingularMatrix { det: f64 },

    #[error("scale factor T0 is singular for configuration {0}")]
    SingularScaleFactor(ConfigLabel),

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("resistor in slot {slot} has non-positive resistance")]
    NonPositiveResistance { slot: usize },
}

/// Configuration name used in error messages; `None` for matrices built by hand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfigLabel(pub Option<ConfigId>);

impl std::fmt::Display for ConfigLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            Some(id) => write!(f, "{id}"),
            None => f.write_str("<custom>"),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
