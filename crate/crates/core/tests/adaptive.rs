use fracdyn_core::adaptive::{
    build_error_model_1, build_error_model_2, run_scenario, AdaptiveScenario,
};
use fracdyn_core::signal::{Signal, Waveform};
use fracdyn_core::solver::OrderSpec;

fn sin_cos() -> Signal {
    Signal::waveforms(
        2,
        1,
        vec![
            Waveform::Sin {
                amp: 1.0,
                omega: 1.0,
                phase: 0.0,
            },
            Waveform::Cos {
                amp: 1.0,
                omega: 1.0,
                phase: 0.0,
            },
        ],
    )
    .unwrap()
}

#[test]
fn scenario_runs_are_bit_identical() {
    let mut scn = AdaptiveScenario::type_i(
        sin_cos(),
        OrderSpec::uniform(0.8, 2).unwrap(),
        vec![1.0, -0.5],
        30.0,
        0.02,
    );
    scn.nu = Some(
        Signal::waveforms(
            1,
            1,
            vec![Waveform::Exp {
                amp: 0.3,
                rate: -0.5,
            }],
        )
        .unwrap(),
    );
    let a = run_scenario(&scn).unwrap();
    let b = run_scenario(&scn).unwrap();
    assert_eq!(a, b);
    assert!(
        !a.certified,
        "perturbed runs never claim certified convergence"
    );
}

#[test]
fn vanishing_signal_is_reported_not_pe() {
    let w = Signal::waveforms(
        1,
        1,
        vec![Waveform::Exp {
            amp: 1.0,
            rate: -1.0,
        }],
    )
    .unwrap();
    let scn = AdaptiveScenario::type_i(
        w,
        OrderSpec::uniform(0.8, 1).unwrap(),
        vec![1.0],
        30.0,
        0.02,
    );
    let r = run_scenario(&scn).unwrap();
    assert!(!r.pe.pe);
    assert!(r.split.epsilon.is_none());
    assert!(!r.certified);
}

#[test]
fn normalized_gain_is_bounded_on_samples() {
    let w = Signal::waveforms(
        1,
        1,
        vec![Waveform::Exp {
            amp: 1.0,
            rate: 0.5,
        }],
    )
    .unwrap();
    let mut scn = AdaptiveScenario::type_i(
        w,
        OrderSpec::uniform(0.9, 1).unwrap(),
        vec![1.0],
        20.0,
        0.01,
    );
    scn.normalize = true;
    let m = build_error_model_1(&scn).unwrap();
    let q = m.spec.q.as_ref().unwrap();
    let eps = m.split.epsilon.unwrap_or(0.0);
    for k in 0..=200 {
        let t = 0.1 * k as f64;
        let gain = (q.eval(t).unwrap()[(0, 0)] - eps).abs();
        assert!(gain <= 1.0, "t {t}: {gain}");
    }
}

#[test]
fn type_ii_perturbation_norm() {
    let w = Signal::waveforms(
        1,
        1,
        vec![Waveform::Sum {
            terms: vec![
                Waveform::Const { value: 2.0 },
                Waveform::Sin {
                    amp: 0.05,
                    omega: 1.0,
                    phase: 0.0,
                },
            ],
        }],
    )
    .unwrap();
    let scn = AdaptiveScenario::type_ii(
        w,
        1.0,
        0.9,
        OrderSpec::uniform(0.9, 1).unwrap(),
        1.0,
        vec![0.0],
        100.0,
        0.05,
    );
    let m = build_error_model_2(&scn).unwrap();
    let mean = m.split.w_mean.as_ref().unwrap()[0];
    let q = m.spec.q.as_ref().unwrap();
    for k in 0..50 {
        let t = 0.7 * k as f64;
        let d = 2.0 + 0.05 * t.sin() - mean;
        let qt = q.eval(t).unwrap();
        assert!((qt.norm_fro() - std::f64::consts::SQRT_2 * d.abs()).abs() < 1e-12);
        assert!((qt.norm2() - d.abs()).abs() < 1e-12);
    }
}
