//! Acceleration-noise spectral density from independent resistor noise.

use crate::bridge::{ConfigId, ExcitationVoltage, PiezoCoefficients};
use crate::error::{invalid, Result};
use crate::linalg::{Mat2, Vec2};
use crate::linearization::SensorModel;
use crate::mechanics::{admissible_alpha, MechanicalParams};

use super::search::{golden_max, scan_min};

/// Grid size of the sensitivity-angle scan.
pub const ALPHA_GRID: usize = 2000;

/// Per-resistor noise PSD `S_R` (V²/Hz) at the evaluation frequency and the
/// bridge excitation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    s_r: f64,
    v_ex: ExcitationVoltage,
}

impl NoiseSpec {
    pub fn new(s_r: f64, v_ex: ExcitationVoltage) -> Result<Self> {
        if !(s_r >= 0.0 && s_r.is_finite()) {
            return Err(invalid(
                "noise PSD S_R",
                format!("{s_r} is negative or not finite"),
            ));
        }
        Ok(Self { s_r, v_ex })
    }

    pub fn s_r(&self) -> f64 {
        self.s_r
    }

    pub fn v_ex(&self) -> ExcitationVoltage {
        self.v_ex
    }
}

/// Noise PSD matrix of the estimated acceleration, g²/Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisePsdMatrix(pub Mat2);

impl NoisePsdMatrix {
    pub fn matrix(&self) -> Mat2 {
        self.0
    }

    /// `(min_θ, max_θ)` of the directional PSD.
    pub fn extremes(&self) -> (f64, f64) {
        self.0.symmetric_eigenvalues()
    }
}

/// Noise unit `S_R / [h V_ex (π_l - π_t)]²` used to normalize PSDs.
pub fn noise_unit(coeffs: &PiezoCoefficients, spec: &NoiseSpec, h: f64) -> f64 {
    spec.s_r / (h * spec.v_ex.volts() * coeffs.difference()).powi(2)
}

/// `S_a = S_R T0⁻¹ (T0⁻¹)ᵀ`.
pub fn noise_psd_matrix(
    config: ConfigId,
    mech: &MechanicalParams,
    coeffs: &PiezoCoefficients,
    spec: &NoiseSpec,
) -> Result<NoisePsdMatrix> {
    let sensor = SensorModel::new(config, *mech, *coeffs, spec.v_ex)?;
    let inv = sensor.scale.inverse();
    Ok(NoisePsdMatrix((inv * inv.transpose()).scale(spec.s_r)))
}

/// `S_a` in units of [`noise_unit`]; independent of `S_R`, `h` and `V_ex`.
pub fn normalized_psd_matrix(
    config: ConfigId,
    mech: &MechanicalParams,
    coeffs: &PiezoCoefficients,
) -> Result<NoisePsdMatrix> {
    let sensor = SensorModel::new(config, *mech, *coeffs, ExcitationVoltage::default())?;
    let inv = sensor.scale.inverse();
    let d2 = (mech.h() * coeffs.difference()).powi(2);
    Ok(NoisePsdMatrix((inv * inv.transpose()).scale(d2)))
}

/// `n(θ)ᵀ S_a n(θ)` with `n(θ) = (cos θ, sin θ)`.
pub fn directional_noise(s_a: &NoisePsdMatrix, theta: f64) -> f64 {
    s_a.0.quadratic_form(Vec2::unit(theta))
}

/// `max_θ` of the directional PSD: the largest eigenvalue of `S_a`.
pub fn worst_case_noise(
    config: ConfigId,
    mech: &MechanicalParams,
    coeffs: &PiezoCoefficients,
    spec: &NoiseSpec,
) -> Result<f64> {
    Ok(noise_psd_matrix(config, mech, coeffs, spec)?.extremes().1)
}

/// Worst-case PSD in units of [`noise_unit`].
pub fn worst_case_normalized(
    config: ConfigId,
    mech: &MechanicalParams,
    coeffs: &PiezoCoefficients,
) -> Result<f64> {
    Ok(normalized_psd_matrix(config, mech, coeffs)?.extremes().1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleOptimum {
    /// Optimal sensitivity angle, rad.
    pub alpha: f64,
    /// Worst-case PSD at `alpha`, g²/Hz.
    pub s0: f64,
    /// `s0` in units of [`noise_unit`].
    pub s0_normalized: f64,
}

/// `min_α max_θ S(θ)` by a dense α scan plus golden-section refinement.
pub fn optimize_sensitivity_angle(
    config: ConfigId,
    coeffs: &PiezoCoefficients,
    spec: &NoiseSpec,
    h: f64,
) -> Result<AngleOptimum> {
    let probe = MechanicalParams::new(h, std::f64::consts::FRAC_PI_4)?;
    // fail early on singular configurations
    worst_case_normalized(config, &probe, coeffs)?;

    let objective = |alpha: f64| {
        probe
            .with_alpha(alpha)
            .and_then(|m| worst_case_normalized(config, &m, coeffs))
            .unwrap_or(f64::INFINITY)
    };
    let (lo, hi) = admissible_alpha();
    // stay strictly inside the open interval
    let margin = 1e-9;
    let best = scan_min(objective, lo + margin, hi - margin, ALPHA_GRID, 1e-12);
    let unit = noise_unit(coeffs, spec, h);
    Ok(AngleOptimum {
        alpha: best.x,
        s0: best.value * unit,
        s0_normalized: best.value,
    })
}

/// Directional maximum by brute-force scan; used to cross-check the
/// eigenvalue shortcut.
pub fn directional_max_scan(s_a: &NoisePsdMatrix) -> f64 {
    let f = |theta: f64| directional_noise(s_a, theta);
    let coarse = (0..720)
        .map(|k| std::f64::consts::PI * k as f64 / 720.0)
        .max_by(|a, b| f(*a).total_cmp(&f(*b)))
        .unwrap_or(0.0);
    let step = std::f64::consts::PI / 720.0;
    golden_max(f, coarse - step, coarse + step, 1e-12)
        .value
        .max(f(coarse))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    const SI: PiezoCoefficients = PiezoCoefficients::P_TYPE_SILICON;

    fn spec() -> NoiseSpec {
        NoiseSpec::new(2.5e-16, ExcitationVoltage::new(3.0).unwrap()).unwrap()
    }

    fn mech(alpha: f64) -> MechanicalParams {
        MechanicalParams::new(1e6, alpha).unwrap()
    }

    #[test]
    fn a_matrix_closed_form() {
        let alpha = 0.3;
        let s = noise_psd_matrix(ConfigId::A, &mech(alpha), &SI, &spec())
            .unwrap()
            .matrix();
        let unit = noise_unit(&SI, &spec(), 1e6);
        let expected = Mat2::diag(2.0 / alpha.cos().powi(2), 2.0 / alpha.sin().powi(2)).scale(unit);
        assert!(s.max_relative_diff(&expected, 1e-12 * expected.frobenius()) < 1e-12);
    }

    #[test]
    fn c_has_cross_spectrum() {
        let s = noise_psd_matrix(ConfigId::C, &mech(FRAC_PI_4), &SI, &spec())
            .unwrap()
            .matrix();
        assert!(s.get(0, 1).abs() > 1e-3 * s.get(0, 0));
        assert_eq!(s.get(0, 1), s.get(1, 0));
    }

    #[test]
    fn directional_a_flat_at_quarter_pi() {
        let s = normalized_psd_matrix(ConfigId::A, &mech(FRAC_PI_4), &SI).unwrap();
        for k in 0..32 {
            let v = directional_noise(&s, 2.0 * PI * k as f64 / 32.0);
            assert!((v - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn directional_at_zero_reads_first_diagonal() {
        let s = noise_psd_matrix(ConfigId::C, &mech(0.4), &SI, &spec()).unwrap();
        assert_eq!(directional_noise(&s, 0.0), s.matrix().get(0, 0));
    }

    #[test]
    fn c_band_at_quarter_pi() {
        let s = normalized_psd_matrix(ConfigId::C, &mech(FRAC_PI_4), &SI).unwrap();
        let (lo, hi) = s.extremes();
        assert!((lo / 8.0 - 0.910).abs() < 0.001, "{lo}");
        assert!((hi / 8.0 - 1.016).abs() < 0.001, "{hi}");
    }

    #[test]
    fn worst_case_diverges_near_guard() {
        let mid = worst_case_normalized(ConfigId::A, &mech(FRAC_PI_4), &SI).unwrap();
        let low = worst_case_normalized(ConfigId::A, &mech(1e-3), &SI).unwrap();
        let high = worst_case_normalized(ConfigId::A, &mech(PI / 2.0 - 1e-3), &SI).unwrap();
        assert!(low > 1e5 * mid && high > 1e5 * mid);
    }

    #[test]
    fn b_worst_case_twice_a() {
        for alpha in [0.2, 0.5, 0.9, 1.3] {
            let a = worst_case_noise(ConfigId::A, &mech(alpha), &SI, &spec()).unwrap();
            let b = worst_case_noise(ConfigId::B, &mech(alpha), &SI, &spec()).unwrap();
            assert!((b / a - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn optimum_for_a_and_b() {
        let a = optimize_sensitivity_angle(ConfigId::A, &SI, &spec(), 1e6).unwrap();
        assert!((a.alpha - FRAC_PI_4).abs() < 1e-3, "{}", a.alpha);
        assert!((a.s0_normalized - 4.0).abs() < 1e-6);
        let unit = noise_unit(&SI, &spec(), 1e6);
        assert!((a.s0 - 4.0 * unit).abs() < 1e-6 * unit);

        let b = optimize_sensitivity_angle(ConfigId::B, &SI, &spec(), 1e6).unwrap();
        assert!((b.alpha - FRAC_PI_4).abs() < 1e-3);
        assert!((b.s0_normalized - 8.0).abs() < 1e-6);
    }

    #[test]
    fn eigenvalue_matches_scan() {
        for id in ConfigId::ALL {
            let s = noise_psd_matrix(id, &mech(0.33), &SI, &spec()).unwrap();
            let scan = directional_max_scan(&s);
            let eig = s.extremes().1;
            assert!((scan - eig).abs() <= 1e-9 * eig);
        }
    }

    #[test]
    fn negative_psd_rejected() {
        assert!(NoiseSpec::new(-1.0, ExcitationVoltage::default()).is_err());
    }
}
