use fracdyn_core::certificates::{pe_estimate, q_certificate, uniform_grid};
use fracdyn_core::ml::{ml_real, ml_scalar};
use fracdyn_core::signal::{Signal, Waveform};
use fracdyn_core::solver::{solve_ivp, OrderSpec, SystemSpec};
use fracdyn_core::special::recip_gamma;
use fracdyn_core::spectral::{sector_classify, EigenClass};
use fracdyn_core::{Complex64, Mat};
use proptest::prelude::*;

fn matrix(n: usize) -> impl Strategy<Value = Mat> {
    prop::collection::vec(-3.0f64..3.0, n * n).prop_map(move |v| Mat::from_vec(n, n, v).unwrap())
}

fn near_boundary(alpha: f64, a: &Mat) -> bool {
    sector_classify(alpha, a, 1e-9)
        .unwrap()
        .eigenvalues
        .iter()
        .any(|e| e.margin.abs() < 1e-6 || e.eigenvalue.norm() < 1e-6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sector_scale_invariance(a in matrix(3), c in 0.1f64..10.0, alpha in 0.1f64..1.9) {
        prop_assume!(!near_boundary(alpha, &a));
        let v1 = sector_classify(alpha, &a, 1e-9).unwrap();
        let v2 = sector_classify(alpha, &a.scale(c), 1e-9).unwrap();
        prop_assert_eq!(v1.overall, v2.overall);
    }

    #[test]
    fn sector_conjugate_pairs(a in matrix(4), alpha in 0.1f64..1.9) {
        let v = sector_classify(alpha, &a, 1e-9).unwrap();
        for e in v.eigenvalues.iter().filter(|e| e.eigenvalue.im.abs() > 1e-8) {
            let partner = v.eigenvalues.iter().find(|f| (f.eigenvalue - e.eigenvalue.conj()).norm() < 1e-8 * (1.0 + e.eigenvalue.norm()));
            prop_assert!(partner.is_some_and(|f| f.class == e.class));
        }
    }

    #[test]
    fn sector_monotone_in_alpha(a in matrix(3), a1 in 0.2f64..1.9, frac in 0.05f64..0.95) {
        let a2 = a1 * frac;
        prop_assume!(!near_boundary(a1, &a) && !near_boundary(a2, &a));
        if sector_classify(a1, &a, 1e-9).unwrap().is_stable() {
            let v = sector_classify(a2, &a, 1e-9).unwrap();
            prop_assert!(v.is_stable());
            prop_assert!(v.eigenvalues.iter().all(|e| e.class == EigenClass::Stable));
        }
    }

    #[test]
    fn ml_conjugate_symmetry(alpha in 0.2f64..1.9, beta in 0.5f64..2.5, re in -4.0f64..2.0, im in -3.0f64..3.0) {
        let z = Complex64::new(re, im);
        let a = ml_scalar(alpha, beta, z).unwrap();
        let b = ml_scalar(alpha, beta, z.conj()).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn ml_shift_recurrence(alpha in 0.3f64..1.8, beta in 0.5f64..2.0, x in -3.0f64..1.5) {
        // E_{α,β}(z) = 1/Γ(β) + z E_{α,α+β}(z)
        let lhs = ml_real(alpha, beta, x).unwrap();
        let rhs = recip_gamma(beta) + x * ml_real(alpha, alpha + beta, x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs() + (x * ml_real(alpha, alpha + beta, x).unwrap()).abs()));
    }

    #[test]
    fn solver_superposition(
        alpha in 0.3f64..1.0,
        x1 in prop::array::uniform2(-1.0f64..1.0),
        x2 in prop::array::uniform2(-1.0f64..1.0),
        n1 in -1.0f64..1.0,
        n2 in -1.0f64..1.0,
    ) {
        let a = Mat::from_rows(&[[-1.0, 0.3], [-0.2, -0.5]]).unwrap();
        let q = Signal::scaled(&Mat::identity(2), Waveform::Sin { amp: 0.2, omega: 1.0, phase: 0.0 }).unwrap();
        let run = |x0: Vec<f64>, nu: f64| {
            let spec = SystemSpec::linear(OrderSpec::uniform(alpha, 2).unwrap(), a.clone(), x0)
                .with_q(q.clone())
                .with_nu(Signal::waveforms(2, 1, vec![Waveform::Cos { amp: nu, omega: 2.0, phase: 0.0 }; 2]).unwrap());
            solve_ivp(&spec, 5.0, 0.05).unwrap()
        };
        let t1 = run(x1.to_vec(), n1);
        let t2 = run(x2.to_vec(), n2);
        let ts = run(vec![x1[0] + x2[0], x1[1] + x2[1]], n1 + n2);
        for k in 0..ts.len() {
            for i in 0..2 {
                prop_assert!((ts.values[k][i] - t1.values[k][i] - t2.values[k][i]).abs() <= 1e-8);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn q_homogeneity_and_refinement(alpha in 0.4f64..1.0, c in 0.1f64..4.0, omega in 0.5f64..2.0) {
        let a = Mat::from_rows(&[[-1.0]]).unwrap();
        let base = Waveform::Cos { amp: 0.2, omega, phase: 0.0 };
        let q1 = Signal::waveforms(1, 1, vec![base.clone()]).unwrap();
        let qc = Signal::waveforms(1, 1, vec![Waveform::Product { factors: vec![Waveform::Const { value: c }, base] }]).unwrap();
        let g = uniform_grid(20.0, 10);
        let r1 = q_certificate(&[alpha], &a, &q1, &g, 1e-9).unwrap();
        let rc = q_certificate(&[alpha], &a, &qc, &g, 1e-9).unwrap();
        prop_assert!((rc.q - c * r1.q).abs() <= 1e-7 * (1.0 + rc.q));
        let fine = q_certificate(&[alpha], &a, &q1, &uniform_grid(20.0, 20), 1e-9).unwrap();
        prop_assert!(fine.q >= r1.q - 1e-12);
    }

    #[test]
    fn pe_scales_quadratically(c in 0.2f64..5.0) {
        let w = |amp: f64| {
            Signal::waveforms(2, 1, vec![
                Waveform::Sin { amp, omega: 1.0, phase: 0.0 },
                Waveform::Cos { amp, omega: 1.0, phase: 0.0 },
            ])
            .unwrap()
        };
        let t0 = [2.0 * std::f64::consts::PI];
        let p1 = pe_estimate(&w(1.0), &t0, 20.0, 1e-10).unwrap();
        let pc = pe_estimate(&w(c), &t0, 20.0, 1e-10).unwrap();
        prop_assert!((pc.epsilon - c * c * p1.epsilon).abs() <= 1e-6 * c * c);
    }
}
