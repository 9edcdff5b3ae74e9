//! Run configuration: line-based `key = value` text with `#` comments.
//!
//! ```text
//! # p-type silicon, steep sensitivity direction
//! coefficients = p-si
//! h = 1e6
//! alpha = 0.4pi
//! configs = A, C
//! ```

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use thiserror::Error;

use crate::bridge::{ConfigId, ExcitationVoltage, PiezoCoefficients, DEFAULT_R0};
use crate::error::Result as CoreResult;
use crate::error_budget::{DeviationMode, DeviationModel, NoiseSpec};
use crate::mechanics::{check_alpha, MechanicalParams};

/// Largest accepted relative deviation rms; keeps sampled resistances positive.
pub const MAX_DELTA: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {kind}")]
pub struct ConfigError {
    pub line: usize,
    pub kind: ConfigErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigErrorKind {
    #[error("expected `key = value`, found `{0}`")]
    Malformed(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("duplicate key `{0}`")]
    DuplicateKey(String),
    #[error("invalid value for `{key}`: {reason}")]
    InvalidValue { key: String, reason: String },
}

/// Fully validated run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub coeffs: PiezoCoefficients,
    /// Stress gain, Pa/g.
    pub h: f64,
    /// Sensitivity angle, rad.
    pub alpha: f64,
    pub v_ex: ExcitationVoltage,
    /// Per-resistor noise PSD, V²/Hz.
    pub s_r: f64,
    /// Nominal resistance, ohm.
    pub r0: f64,
    /// Relative deviation rms Δ.
    pub delta: f64,
    pub deviation_mode: DeviationMode,
    pub configs: Vec<ConfigId>,
    /// Acceleration magnitude for nonlinearity figures, g.
    pub magnitude: f64,
    pub theta_points: usize,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_points: usize,
    pub samples: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            coeffs: PiezoCoefficients::P_TYPE_SILICON,
            h: 1e6,
            alpha: PI / 4.0,
            v_ex: ExcitationVoltage::default(),
            s_r: 1e-16,
            r0: DEFAULT_R0,
            delta: 0.01,
            deviation_mode: DeviationMode::IndependentAll,
            configs: ConfigId::ALL.to_vec(),
            magnitude: 1.0,
            theta_points: 361,
            alpha_min: 0.05 * PI,
            alpha_max: 0.45 * PI,
            alpha_points: 201,
            samples: 100_000,
            seed: 42,
            output: None,
        }
    }
}

impl RunConfig {
    pub fn mech(&self) -> CoreResult<MechanicalParams> {
        MechanicalParams::new(self.h, self.alpha)
    }

    pub fn noise_spec(&self) -> CoreResult<NoiseSpec> {
        NoiseSpec::new(self.s_r, self.v_ex)
    }

    pub fn deviation_model(&self, mode: DeviationMode) -> CoreResult<DeviationModel> {
        DeviationModel::new(mode, self.delta)
    }
}

/// Parses an angle in radians or as `<x>pi` (also `<x>*pi`, `<x>π`, `pi`),
/// optionally divided by a number: `pi/4`, `3pi/8`.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let t = text.trim();
    if let Some((num, den)) = t.split_once('/') {
        let den = parse_f64(den)?;
        if den == 0.0 {
            return Err(format!("`{t}` divides by zero"));
        }
        return Ok(parse_angle(num)? / den);
    }
    let stripped = t
        .strip_suffix("pi")
        .or_else(|| t.strip_suffix("PI"))
        .or_else(|| t.strip_suffix('π'));
    match stripped {
        Some(factor) => {
            let factor = factor.trim().trim_end_matches('*').trim();
            let k = if factor.is_empty() {
                1.0
            } else {
                parse_f64(factor)?
            };
            Ok(k * PI)
        }
        None => parse_f64(t),
    }
}

fn parse_f64(text: &str) -> Result<f64, String> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| format!("`{text}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{text}` is not finite"))
    }
}

fn parse_usize(text: &str) -> Result<usize, String> {
    let t = text.trim();
    if let Ok(v) = t.parse::<usize>() {
        return Ok(v);
    }
    // accept `1e5`
    let f = parse_f64(t)?;
    if f >= 0.0 && f.fract() == 0.0 && f <= usize::MAX as f64 {
        Ok(f as usize)
    } else {
        Err(format!("`{text}` is not a non-negative integer"))
    }
}

fn positive(v: f64, what: &str) -> Result<f64, String> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{what} must be positive"))
    }
}

const KEYS: &[&str] = &[
    "coefficients",
    "pi_l",
    "pi_t",
    "h",
    "alpha",
    "v_ex",
    "s_r",
    "r0",
    "delta",
    "deviation_mode",
    "configs",
    "magnitude",
    "theta_points",
    "alpha_min",
    "alpha_max",
    "alpha_points",
    "samples",
    "seed",
    "output",
];

/// Parses and validates a configuration; unspecified keys take defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut pi_l = cfg.coeffs.pi_l();
    let mut pi_t = cfg.coeffs.pi_t();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |kind| ConfigError { line, kind };
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(ConfigErrorKind::Malformed(content.to_string())))?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(err(ConfigErrorKind::Malformed(content.to_string())));
        }
        if !KEYS.contains(&key) {
            return Err(err(ConfigErrorKind::UnknownKey(key.to_string())));
        }
        if seen.insert(key.to_string(), line).is_some() {
            return Err(err(ConfigErrorKind::DuplicateKey(key.to_string())));
        }
        let invalid = |reason: String| {
            err(ConfigErrorKind::InvalidValue {
                key: key.to_string(),
                reason,
            })
        };

        match key {
            "coefficients" => match value.to_ascii_lowercase().as_str() {
                "p-si" | "p-type-si" | "p-type-silicon" => {
                    pi_l = PiezoCoefficients::P_TYPE_SILICON.pi_l();
                    pi_t = PiezoCoefficients::P_TYPE_SILICON.pi_t();
                }
                other => return Err(invalid(format!("unknown preset `{other}`"))),
            },
            "pi_l" => pi_l = parse_f64(value).map_err(invalid)?,
            "pi_t" => pi_t = parse_f64(value).map_err(invalid)?,
            "h" => {
                cfg.h = parse_f64(value)
                    .and_then(|v| positive(v, "h"))
                    .map_err(invalid)?
            }
            "alpha" => {
                let a = parse_angle(value).map_err(invalid)?;
                check_alpha(a).map_err(|e| invalid(format!("singular sensitivity angle: {e}")))?;
                cfg.alpha = a;
            }
            "v_ex" => {
                let v = parse_f64(value).map_err(invalid)?;
                cfg.v_ex = ExcitationVoltage::new(v).map_err(|e| invalid(e.to_string()))?;
            }
            "s_r" => {
                let v = parse_f64(value).map_err(invalid)?;
                if v < 0.0 {
                    return Err(invalid("S_R must be non-negative".into()));
                }
                cfg.s_r = v;
            }
            "r0" => {
                cfg.r0 = parse_f64(value)
                    .and_then(|v| positive(v, "r0"))
                    .map_err(invalid)?
            }
            "delta" => {
                let v = parse_f64(value).map_err(invalid)?;
                if !(0.0..=MAX_DELTA).contains(&v) {
                    return Err(invalid(format!("delta must lie in [0, {MAX_DELTA}]")));
                }
                cfg.delta = v;
            }
            "deviation_mode" => {
                cfg.deviation_mode = value
                    .parse()
                    .map_err(|e: crate::Error| invalid(e.to_string()))?
            }
            "configs" => {
                let mut ids = Vec::new();
                for part in value.split(',') {
                    let id: ConfigId = part
                        .parse()
                        .map_err(|e: crate::Error| invalid(e.to_string()))?;
                    if !ids.contains(&id) {
                        ids.push(id);
                    }
                }
                cfg.configs = ids;
            }
            "magnitude" => {
                let v = parse_f64(value).map_err(invalid)?;
                if v < 0.0 {
                    return Err(invalid("magnitude must be non-negative".into()));
                }
                cfg.magnitude = v;
            }
            "theta_points" => {
                cfg.theta_points = parse_usize(value).map_err(invalid)?;
                if cfg.theta_points < 3 {
                    return Err(invalid("need at least 3 points".into()));
                }
            }
            "alpha_points" => {
                cfg.alpha_points = parse_usize(value).map_err(invalid)?;
                if cfg.alpha_points < 2 {
                    return Err(invalid("need at least 2 points".into()));
                }
            }
            "alpha_min" | "alpha_max" => {
                let a = parse_angle(value).map_err(invalid)?;
                check_alpha(a).map_err(|e| invalid(format!("singular sensitivity angle: {e}")))?;
                if key == "alpha_min" {
                    cfg.alpha_min = a;
                } else {
                    cfg.alpha_max = a;
                }
            }
            "samples" => {
                cfg.samples = parse_usize(value).map_err(invalid)?;
                if cfg.samples < crate::error_budget::offset::MIN_SAMPLES {
                    return Err(invalid(format!(
                        "need at least {} samples",
                        crate::error_budget::offset::MIN_SAMPLES
                    )));
                }
            }
            "seed" => {
                cfg.seed = value
                    .parse()
                    .map_err(|_| invalid(format!("`{value}` is not a u64")))?
            }
            "output" => cfg.output = Some(PathBuf::from(value)),
            _ => unreachable!("key list and match arms out of sync"),
        }
    }

    let line_of = |keys: &[&str]| {
        keys.iter()
            .filter_map(|k| seen.get(*k))
            .copied()
            .max()
            .unwrap_or(0)
    };
    cfg.coeffs = PiezoCoefficients::new(pi_l, pi_t).map_err(|e| ConfigError {
        line: line_of(&["pi_l", "pi_t", "coefficients"]),
        kind: ConfigErrorKind::InvalidValue {
            key: "pi_l/pi_t".into(),
            reason: e.to_string(),
        },
    })?;
    if cfg.alpha_min >= cfg.alpha_max {
        return Err(ConfigError {
            line: line_of(&["alpha_min", "alpha_max"]),
            kind: ConfigErrorKind::InvalidValue {
                key: "alpha_min/alpha_max".into(),
                reason: "alpha_min must be below alpha_max".into(),
            },
        });
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.coeffs, PiezoCoefficients::P_TYPE_SILICON);
        assert_eq!(cfg.h, 1e6);
        assert_eq!(cfg.alpha, PI / 4.0);
        assert_eq!(cfg.samples, 100_000);
        assert_eq!(cfg.seed, 42);
    }

    #[test]
    fn pi_suffix_angles() {
        let cfg = parse_config("alpha = 0.4pi").unwrap();
        assert_eq!(cfg.alpha, 0.4 * PI);
        assert_eq!(parse_angle("0.25 * pi").unwrap(), 0.25 * PI);
        assert_eq!(parse_angle("0.1π").unwrap(), 0.1 * PI);
        assert_eq!(parse_angle("0.7").unwrap(), 0.7);
        assert_eq!(parse_angle("pi/4").unwrap(), PI / 4.0);
        assert_eq!(parse_angle("3pi / 8").unwrap(), 3.0 * PI / 8.0);
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("fourty").is_err());
    }

    #[test]
    fn singular_angle_rejected_with_line() {
        let err = parse_config("# header\n\nalpha = 0.5pi\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(
            err.to_string().contains("singular sensitivity angle"),
            "{err}"
        );
    }

    #[test]
    fn unknown_and_malformed_lines() {
        let err = parse_config("h = 1e6\nbeta = 2").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.kind, ConfigErrorKind::UnknownKey("beta".into()));

        let err = parse_config("h 1e6").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(matches!(err.kind, ConfigErrorKind::Malformed(_)));

        let err = parse_config("h = 1\nh = 2").unwrap_err();
        assert!(matches!(err.kind, ConfigErrorKind::DuplicateKey(_)));
    }

    #[test]
    fn out_of_range_values() {
        for (text, line) in [
            ("h = -1", 1),
            ("v_ex = 0", 1),
            ("\ns_r = -1e-16", 2),
            ("delta = 0.5", 1),
            ("samples = 10", 1),
            ("configs = A, E", 1),
            ("deviation_mode = chaos", 1),
            ("pi_l = 1e-10\npi_t = 1e-10", 2),
            ("alpha_min = 0.3pi\nalpha_max = 0.2pi", 2),
        ] {
            let err = parse_config(text).unwrap_err();
            assert_eq!(err.line, line, "{text}: {err}");
        }
    }

    #[test]
    fn full_file() {
        let text = "\
            coefficients = p-si   # preset\n\
            pi_t = -60e-11\n\
            h = 2e6\n\
            v_ex = 3.3\n\
            s_r = 4e-17\n\
            delta = 0.002\n\
            deviation_mode = per-orientation\n\
            configs = C, a\n\
            samples = 1e4\n\
            seed = 7\n\
            output = out/report.csv\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.coeffs.pi_t(), -60e-11);
        assert_eq!(cfg.coeffs.pi_l(), 71.8e-11);
        assert_eq!(cfg.v_ex.volts(), 3.3);
        assert_eq!(cfg.deviation_mode, DeviationMode::PerOrientation);
        assert_eq!(cfg.configs, vec![ConfigId::C, ConfigId::A]);
        assert_eq!(cfg.samples, 10_000);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.output, Some(PathBuf::from("out/report.csv")));
    }
}
