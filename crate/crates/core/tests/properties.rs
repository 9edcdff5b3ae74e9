use std::f64::consts::{FRAC_PI_2, PI};

use piezobridge_core::bridge::{standard_configuration, standard_configuration_with_r0};
use piezobridge_core::error_budget::offset::{offset_squared_errors, MonteCarloEstimate};
use piezobridge_core::error_budget::search::scan_max;
use piezobridge_core::error_budget::{
    directional_noise, noise_psd_matrix, nonlinearity_error_numeric, normalized_psd_matrix,
    offset_variance_monte_carlo, DeviationMode, DeviationModel, NoiseSpec,
};
use piezobridge_core::linearization::{
    analytic_sensitivity, estimate_acceleration, nominal_scale_factor, quadratic_response_fit,
    SensorModel,
};
use piezobridge_core::mechanics::{nominal_stress_map, stress_deviation_error};
use piezobridge_core::report::{reproduce_figure, run_report, RunConfig, Table};
use piezobridge_core::{
    ConfigId, DeviationAssignment, ExcitationVoltage, Mat2, MechanicalParams, PiezoCoefficients,
    Polar, StressPair, StressPerturbation, Vec2,
};
use proptest::prelude::*;

const SI: PiezoCoefficients = PiezoCoefficients::P_TYPE_SILICON;

fn config() -> impl Strategy<Value = ConfigId> {
    prop::sample::select(ConfigId::ALL.to_vec())
}

fn alpha() -> impl Strategy<Value = f64> {
    0.02f64..(FRAC_PI_2 - 0.02)
}

fn vex(v: f64) -> ExcitationVoltage {
    ExcitationVoltage::new(v).unwrap()
}

proptest! {
    #[test]
    fn excitation_linearity(id in config(), s1 in -1e8f64..1e8, s2 in -1e8f64..1e8, k in 0.1f64..20.0) {
        let dual = standard_configuration(id);
        let st = StressPair::new(s1, s2);
        let base = dual.outputs(&SI, st, &DeviationAssignment::ZERO, vex(1.0));
        let scaled = dual.outputs(&SI, st, &DeviationAssignment::ZERO, vex(k));
        prop_assert!((scaled - base.scale(k)).norm() <= 1e-14 * k * base.norm().max(1e-300));
    }

    #[test]
    fn swapping_dividers_negates(id in config(), s1 in -1e8f64..1e8, s2 in -1e8f64..1e8,
                                 dev in prop::array::uniform8(-0.1f64..0.1)) {
        let dev = DeviationAssignment::new(dev).unwrap();
        for net in standard_configuration(id).bridges() {
            let v = net.output(&SI, StressPair::new(s1, s2), &dev, vex(1.0));
            let w = net.swapped().output(&SI, StressPair::new(s1, s2), &dev, vex(1.0));
            prop_assert_eq!(v, -w);
        }
    }

    #[test]
    fn config_a_closed_form(s1 in -1e8f64..1e8, s2 in -1e8f64..1e8, v in 0.5f64..5.0) {
        let dual = standard_configuration(ConfigId::A);
        let out = dual.outputs(&SI, StressPair::new(s1, s2), &DeviationAssignment::ZERO, vex(v));
        for (got, s) in [(out.x, s1), (out.y, s2)] {
            let expected = v * SI.difference() * s / (2.0 + SI.sum() * s);
            prop_assert!((got - expected).abs() <= 1e-14 * expected.abs().max(1e-300));
        }
    }

    #[test]
    fn stress_deviation_is_configuration_independent(
        al in alpha(),
        dh in prop::array::uniform4(-0.1f64..0.1),
        mag in 0.0f64..2.0, theta in 0.0f64..(2.0 * PI),
    ) {
        let mech = MechanicalParams::new(1e6, al).unwrap();
        let h0 = nominal_stress_map(&mech);
        let dh = StressPerturbation(Mat2::new(dh[0], dh[1], dh[2], dh[3]).scale(1e6));
        let a = Polar::new(mag, theta).to_cartesian();
        let reference = stress_deviation_error(&h0, &dh, a).unwrap();
        for id in ConfigId::ALL {
            let w = analytic_sensitivity(id, &SI, vex(1.0));
            let t0 = nominal_scale_factor(&w, &h0).unwrap();
            let v = w.matrix * (h0.perturbed(&dh).matrix() * a);
            let err = estimate_acceleration(&t0, v) - a;
            prop_assert!((err - reference).norm() <= 1e-12);
        }
    }

    #[test]
    fn linear_round_trip(id in config(), al in alpha(), a1 in -5.0f64..5.0, a2 in -5.0f64..5.0) {
        let sensor = SensorModel::new(id, MechanicalParams::new(1e6, al).unwrap(), SI, vex(1.0)).unwrap();
        let a = Vec2::new(a1, a2);
        let back = estimate_acceleration(&sensor.scale, sensor.scale.matrix() * a);
        prop_assert!((back - a).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn estimator_is_excitation_invariant(id in config(), al in alpha(), theta in 0.0f64..(2.0 * PI), k in 0.2f64..8.0) {
        let mech = MechanicalParams::new(1e6, al).unwrap();
        let a = Polar::new(1.5, theta).to_cartesian();
        let one = SensorModel::new(id, mech, SI, vex(1.0)).unwrap().estimate(a, &DeviationAssignment::ZERO);
        let other = SensorModel::new(id, mech, SI, vex(k)).unwrap().estimate(a, &DeviationAssignment::ZERO);
        prop_assert!((one - other).norm() <= 1e-13 * one.norm());
    }

    #[test]
    fn psd_matrix_symmetric_and_semidefinite(id in config(), al in alpha(), s_r in 0.0f64..1e-14) {
        let spec = NoiseSpec::new(s_r, vex(2.0)).unwrap();
        let s = noise_psd_matrix(id, &MechanicalParams::new(1e6, al).unwrap(), &SI, &spec).unwrap().matrix();
        prop_assert_eq!(s.get(0, 1), s.get(1, 0));
        let (lo, _) = s.symmetric_eigenvalues();
        prop_assert!(lo >= -1e-12 * s.frobenius());
    }

    #[test]
    fn directional_extremes_are_eigenvalues(id in config(), al in alpha()) {
        let s = normalized_psd_matrix(id, &MechanicalParams::new(1e6, al).unwrap(), &SI).unwrap();
        let (lo, hi) = s.extremes();
        let f = |t: f64| directional_noise(&s, t);
        let gmax = scan_max(f, 0.0, 2.0 * PI, 720, true, 1e-12).value;
        let gmin = -scan_max(|t| -f(t), 0.0, 2.0 * PI, 720, true, 1e-12).value;
        prop_assert!(gmin >= lo - 1e-12 * hi && gmax <= hi * (1.0 + 1e-12));
        prop_assert!((gmin - lo).abs() <= 1e-9 * hi && (gmax - hi).abs() <= 1e-9 * hi);
    }
}

#[test]
fn w_and_q_scale_with_excitation() {
    for id in ConfigId::ALL {
        let dual = standard_configuration(id);
        let q1 = quadratic_response_fit(&dual, &SI, vex(1.0));
        let q3 = quadratic_response_fit(&dual, &SI, vex(3.0));
        for k in 0..2 {
            let scale = q1.q[k].frobenius();
            assert!(
                (q3.q[k] - q1.q[k].scale(3.0)).frobenius() <= 1e-8 * scale,
                "{id}"
            );
        }
        let w1 = piezobridge_core::linearization::numeric_linearize(&dual, &SI, vex(1.0)).matrix;
        let w3 = piezobridge_core::linearization::numeric_linearize(&dual, &SI, vex(3.0)).matrix;
        assert!((w3 - w1.scale(3.0)).frobenius() <= 1e-12 * w3.frobenius());
    }
}

#[test]
fn quadratic_fit_residual_is_third_order() {
    for id in ConfigId::ALL {
        let dual = standard_configuration(id);
        let w = analytic_sensitivity(id, &SI, vex(1.0)).matrix;
        let q = quadratic_response_fit(&dual, &SI, vex(1.0));
        let residual = |scale: f64| {
            let s = StressPair::new(0.8 * scale, -0.6 * scale);
            let exact = dual.outputs(&SI, s, &DeviationAssignment::ZERO, vex(1.0));
            (exact - w * s.as_vec() - q.evaluate(s)).norm()
        };
        // step-halving from 2e7 Pa: the residual should shrink ~8x per halving
        let mut scale = 2e7;
        for _ in 0..3 {
            let ratio = residual(scale) / residual(scale / 2.0);
            assert!((ratio - 8.0).abs() < 0.5, "{id}: ratio {ratio} at {scale}");
            scale /= 2.0;
        }
        // C = residual/‖σ‖³ stays bounded
        let c_est = residual(2e7) / 2e7f64.powi(3);
        assert!(residual(1e6) <= 1.1 * c_est * 1e18, "{id}");
    }
}

#[test]
fn nonlinearity_scales_quadratically() {
    let mech = MechanicalParams::new(1e6, 0.3 * PI).unwrap();
    for id in ConfigId::ALL {
        for k in 0..16 {
            let theta = 2.0 * PI * k as f64 / 16.0 + 0.05;
            let one = nonlinearity_error_numeric(id, &mech, &SI, vex(1.0), Polar::new(1.0, theta))
                .unwrap();
            let two = nonlinearity_error_numeric(id, &mech, &SI, vex(1.0), Polar::new(2.0, theta))
                .unwrap();
            assert!(
                (two - one.scale(4.0)).norm() <= 1e-3 * two.norm(),
                "{id} {k}"
            );
        }
    }
}

#[test]
fn balanced_null_for_every_r0() {
    for id in ConfigId::ALL {
        for r0 in [1.0, 1e3, 1e6] {
            let dual = standard_configuration_with_r0(id, r0).unwrap();
            assert_eq!(
                dual.outputs(&SI, StressPair::ZERO, &DeviationAssignment::ZERO, vex(5.0)),
                Vec2::ZERO
            );
        }
    }
}

#[test]
fn monte_carlo_is_partition_invariant() {
    let mech = MechanicalParams::new(1e6, 0.3).unwrap();
    let model = DeviationModel::new(DeviationMode::IndependentAll, 0.01).unwrap();
    let sensor = SensorModel::new(ConfigId::C, mech, SI, vex(1.0)).unwrap();
    let n = 10_000u64;
    let serial = offset_squared_errors(&sensor, &model, 99, 0..n).unwrap();

    let mut pieces = Vec::new();
    for range in [0..1234u64, 1234..1235, 1235..7000, 7000..n] {
        pieces.extend(offset_squared_errors(&sensor, &model, 99, range).unwrap());
    }
    assert_eq!(serial, pieces);

    let threaded = std::thread::scope(|scope| {
        let handles: Vec<_> = [0..2500u64, 2500..5000, 5000..7500, 7500..n]
            .into_iter()
            .map(|r| scope.spawn(|| offset_squared_errors(&sensor, &model, 99, r).unwrap()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().unwrap())
            .collect::<Vec<_>>()
    });
    assert_eq!(serial, threaded);

    let direct = MonteCarloEstimate::from_samples(&serial);
    let pooled =
        offset_variance_monte_carlo(ConfigId::C, &mech, &SI, vex(1.0), &model, n as usize, 99)
            .unwrap();
    assert_eq!(direct, pooled);
    let again =
        offset_variance_monte_carlo(ConfigId::C, &mech, &SI, vex(1.0), &model, n as usize, 99)
            .unwrap();
    assert_eq!(pooled, again);
    let other_seed =
        offset_variance_monte_carlo(ConfigId::C, &mech, &SI, vex(1.0), &model, n as usize, 100)
            .unwrap();
    assert_ne!(pooled.mean, other_seed.mean);
}

#[test]
fn csv_is_byte_deterministic_and_round_trips() {
    let cfg = RunConfig {
        samples: 3000,
        ..RunConfig::default()
    };
    let first = run_report(&cfg).unwrap().to_csv();
    let second = run_report(&cfg).unwrap().to_csv();
    assert_eq!(first, second);

    let budget = run_report(&cfg).unwrap();
    let back = Table::from_csv(&first).unwrap();
    let entry = budget.get(ConfigId::C).unwrap();
    let row = back
        .rows
        .iter()
        .position(|r| {
            r[0].as_f64().is_none()
                && matches!(&r[0], piezobridge_core::report::Cell::Text(t) if t == "C")
        })
        .unwrap();
    let idx = back.column_index("max_nonlinearity").unwrap();
    let parsed = back.rows[row][idx].as_f64().unwrap();
    assert!((parsed - entry.max_nonlinearity).abs() <= 1e-11 * entry.max_nonlinearity);

    for n in 3..=7 {
        let fig = reproduce_figure(n, &cfg).unwrap();
        let csv = fig.to_csv();
        assert_eq!(csv, reproduce_figure(n, &cfg).unwrap().to_csv());
        let parsed = Table::from_csv(&csv).unwrap();
        for (orig, got) in fig.rows.iter().flatten().zip(parsed.rows.iter().flatten()) {
            let (a, b) = (orig.as_f64().unwrap(), got.as_f64().unwrap());
            assert!((a - b).abs() <= 1e-11 * a.abs(), "figure {n}: {a} vs {b}");
        }
    }
}

#[test]
fn noise_columns_invariant_under_unit_preserving_rescale() {
    let base = RunConfig::default();
    let mut scaled = base.clone();
    // S_R x 36, h x 2, V_ex x 3 keeps S_R/[h V_ex (pi_l - pi_t)]^2 fixed
    scaled.s_r = base.s_r * 36.0;
    scaled.h = base.h * 2.0;
    scaled.v_ex = vex(base.v_ex.volts() * 3.0);
    for n in [5, 6, 7] {
        let a = reproduce_figure(n, &base).unwrap();
        let b = reproduce_figure(n, &scaled).unwrap();
        for (x, y) in a.rows.iter().flatten().zip(b.rows.iter().flatten()) {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0), "figure {n}");
        }
    }
}

#[test]
fn report_defaults_favor_configuration_a() {
    let cfg = RunConfig {
        samples: 2000,
        ..RunConfig::default()
    };
    let budget = run_report(&cfg).unwrap();
    let a = budget.get(ConfigId::A).unwrap();
    let channels = |e: &piezobridge_core::report::ConfigBudget| {
        let mut v = vec![
            e.max_nonlinearity,
            e.noise_worst,
            e.noise_worst_normalized,
            e.s0,
            e.s0_normalized,
        ];
        v.extend(e.offsets.iter().map(|o| o.analytic));
        v
    };
    let a_vals = channels(a);
    for e in &budget.entries {
        for (x, y) in a_vals.iter().zip(channels(e)) {
            assert!(*x <= y * (1.0 + 1e-9) + 1e-300, "{}: {x} > {y}", e.config);
        }
    }
}

#[test]
fn zero_mismatch_and_noise_zero_the_columns() {
    let cfg = RunConfig {
        delta: 0.0,
        s_r: 0.0,
        samples: 500,
        ..RunConfig::default()
    };
    for e in run_report(&cfg).unwrap().entries {
        for o in &e.offsets {
            assert_eq!(
                (o.analytic, o.monte_carlo.mean, o.monte_carlo.std_error),
                (0.0, 0.0, 0.0)
            );
        }
        assert_eq!(e.noise_worst, 0.0);
        assert_eq!(e.s0, 0.0);
    }
}

#[test]
fn per_orientation_offsets_identical_across_configurations() {
    let cfg = RunConfig {
        samples: 500,
        ..RunConfig::default()
    };
    let budget = run_report(&cfg).unwrap();
    let pick = |e: &piezobridge_core::report::ConfigBudget| {
        e.offsets
            .iter()
            .find(|o| o.mode == DeviationMode::PerOrientation)
            .unwrap()
            .analytic
    };
    let first = pick(&budget.entries[0]);
    assert!(budget.entries.iter().all(|e| pick(e) == first));
}
