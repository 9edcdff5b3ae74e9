//! Offset error from resistor mismatch.
//!
//! Each resistor carries a relative deviation `Δ_I` with zero mean and
//! variance `Δ²`. Three correlation structures are supported; for each the
//! expected squared offset error `⟨‖Δa‖²⟩` is given in closed form and by a
//! seeded Monte Carlo run over the exact networks.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::bridge::{
    ConfigId, DeviationAssignment, DualBridge, ExcitationVoltage, PiezoCoefficients, RESISTOR_COUNT,
};
use crate::error::{invalid, Error, Result};
use crate::linalg::Vec2;
use crate::linearization::SensorModel;
use crate::mechanics::MechanicalParams;

/// Smallest accepted Monte Carlo sample count.
pub const MIN_SAMPLES: usize = 100;

/// Correlation structure of the resistor deviations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeviationMode {
    /// Every resistor deviates independently.
    IndependentAll,
    /// Resistors on the same proof mass share one deviation.
    PerProofMass,
    /// All longitudinal resistors share one deviation, all transversal another.
    PerOrientation,
}

impl DeviationMode {
    pub const ALL: [DeviationMode; 3] = [
        DeviationMode::IndependentAll,
        DeviationMode::PerProofMass,
        DeviationMode::PerOrientation,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            DeviationMode::IndependentAll => "independent",
            DeviationMode::PerProofMass => "per-proof-mass",
            DeviationMode::PerOrientation => "per-orientation",
        }
    }
}

impl fmt::Display for DeviationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DeviationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "independent" | "independent-all" => Ok(DeviationMode::IndependentAll),
            "per-proof-mass" | "per-mass" => Ok(DeviationMode::PerProofMass),
            "per-orientation" => Ok(DeviationMode::PerOrientation),
            other => Err(invalid("deviation mode", format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationModel {
    mode: DeviationMode,
    delta_rms: f64,
}

impl DeviationModel {
    pub fn new(mode: DeviationMode, delta_rms: f64) -> Result<Self> {
        if !(delta_rms >= 0.0 && delta_rms.is_finite()) {
            return Err(invalid(
                "deviation rms",
                format!("{delta_rms} is negative or not finite"),
            ));
        }
        Ok(Self { mode, delta_rms })
    }

    pub fn mode(&self) -> DeviationMode {
        self.mode
    }

    pub fn delta_rms(&self) -> f64 {
        self.delta_rms
    }
}

/// Closed-form `⟨‖Δa‖²⟩` in g².
///
/// For configuration C with per-proof-mass correlation the linearized C
/// network gives `v0 = (V_ex/2)(Δ₁ - Δ₂)[1, 1]`, so the result is
/// `2Δ² / [h π_l sin 2α]²`.
pub fn offset_variance_analytic(
    config: ConfigId,
    mech: &MechanicalParams,
    coeffs: &PiezoCoefficients,
    model: &DeviationModel,
) -> f64 {
    let delta2 = model.delta_rms * model.delta_rms;
    let h = mech.h();
    let alpha = mech.alpha();
    let (pl, pt) = (coeffs.pi_l(), coeffs.pi_t());
    let k = coeffs.difference();
    let sin2a = (2.0 * alpha).sin();

    match model.mode {
        DeviationMode::IndependentAll => {
            let a = 2.0 * delta2 / (h * k * sin2a).powi(2);
            match config {
                ConfigId::A => a,
                ConfigId::B | ConfigId::D => 2.0 * a,
                ConfigId::C => {
                    let ratio =
                        (3.0 * pl * pl + pt * pt + 2.0 * pl * (pl + pt) * (2.0 * alpha).cos())
                            / (4.0 * pl * pl);
                    ratio * 2.0 * a
                }
            }
        }
        DeviationMode::PerProofMass => match config {
            ConfigId::A | ConfigId::B | ConfigId::D => 0.0,
            ConfigId::C => 2.0 * delta2 / (h * pl * sin2a).powi(2),
        },
        DeviationMode::PerOrientation => 2.0 * delta2 / (h * k * alpha.sin()).powi(2),
    }
}

/// Deviation assignment for sample `index` of a run seeded with `seed`.
///
/// Sample `index` always reads ChaCha8 stream `index` of `seed`, so any
/// subset of indices can be regenerated independently.
pub fn sample_deviations(
    dual: &DualBridge,
    model: &DeviationModel,
    seed: u64,
    index: u64,
) -> Result<DeviationAssignment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut z = [0.0f64; RESISTOR_COUNT];
    for v in z.iter_mut() {
        *v = StandardNormal.sample(&mut rng);
    }

    let mut delta = [0.0; RESISTOR_COUNT];
    for r in dual.resistors() {
        let draw = match model.mode {
            DeviationMode::IndependentAll => z[r.slot()],
            DeviationMode::PerProofMass => z[r.proof_mass().index()],
            DeviationMode::PerOrientation => z[r.orientation().index()],
        };
        delta[r.slot()] = model.delta_rms * draw;
    }
    DeviationAssignment::new(delta)
}

/// Offset error `T0⁻¹ v0` for one deviation assignment.
pub fn offset_error(sensor: &SensorModel, dev: &DeviationAssignment) -> Vec2 {
    sensor.estimate(Vec2::ZERO, dev)
}

/// `‖Δa‖²` for each sample index in `range`, in index order.
pub fn offset_squared_errors(
    sensor: &SensorModel,
    model: &DeviationModel,
    seed: u64,
    range: Range<u64>,
) -> Result<Vec<f64>> {
    range
        .map(|i| {
            let dev = sample_deviations(&sensor.dual, model, seed, i)?;
            Ok(offset_error(sensor, &dev).norm_squared())
        })
        .collect()
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl MonteCarloEstimate {
    /// Summarizes `values` by summing in slice order.
    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            mean,
            std_error: (var / n as f64).sqrt(),
            samples: n,
        }
    }

    /// Distance from `reference` in units of the standard error.
    pub fn z_score(&self, reference: f64) -> f64 {
        if self.std_error == 0.0 {
            if self.mean == reference {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - reference).abs() / self.std_error
        }
    }
}

const CHUNK: u64 = 4096;

/// Monte Carlo estimate of `⟨‖Δa‖²⟩` over the exact networks at zero stress.
///
/// Work is spread over the rayon pool in fixed chunks; the per-sample values
/// are reassembled in index order before summation, so the result is
/// bit-identical to a single-threaded run with the same seed.
pub fn offset_variance_monte_carlo(
    config: ConfigId,
    mech: &MechanicalParams,
    coeffs: &PiezoCoefficients,
    v_ex: ExcitationVoltage,
    model: &DeviationModel,
    n_samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if n_samples < MIN_SAMPLES {
        return Err(invalid(
            "sample count",
            format!("{n_samples} < {MIN_SAMPLES}"),
        ));
    }
    let sensor = SensorModel::new(config, *mech, *coeffs, v_ex)?;
    let n = n_samples as u64;
    let chunks: Vec<Range<u64>> = (0..n.div_ceil(CHUNK))
        .map(|c| c * CHUNK..((c + 1) * CHUNK).min(n))
        .collect();
    let parts = chunks
        .into_par_iter()
        .map(|r| offset_squared_errors(&sensor, model, seed, r))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = parts.into_iter().flatten().collect();
    Ok(MonteCarloEstimate::from_samples(&values))
}
