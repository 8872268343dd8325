//! Quadratic-form comparison `A(t) ≤ −εI + Q(t)` and its scalar majorant.

use alloc::vec;
use alloc::vec::Vec;

use super::{q_certificate, uniform_grid, QCertificate};
use crate::error::{bail, Result};
use crate::linalg::{sym_eigenvalues, Mat};
use crate::signal::Signal;
use crate::solver::{asymptotic_verdict, solve_ivp, OrderSpec, SystemSpec, Trajectory, Verdict};

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonReport {
    /// `λ_max(sym A(t) + εI − sym Q(t)) ≤ tol` at every grid time.
    pub holds: bool,
    pub worst_time: f64,
    pub worst_value: f64,
    pub tol: f64,
    pub grid: Vec<f64>,
    /// `λ_M(t)`, the largest eigenvalue of `sym Q(t)`, on the grid.
    pub lambda_m: Vec<f64>,
    /// Solution of `(1/2) D^α y = (−ε + λ_M(t)) y`, `y(0) = 1`.
    pub majorant: Trajectory,
    pub majorant_verdict: Verdict,
    /// `q`-certificate of the majorant equation.
    pub majorant_q: Option<QCertificate>,
}

fn lambda_max_sym(m: &Mat) -> f64 {
    *sym_eigenvalues(&m.sym_part())
        .last()
        .expect("non-empty matrix")
}

/// Checks the ordering on `t_grid` and integrates the majorant with `step`
/// up to the last grid time.
pub fn comparison_check(
    alpha: f64,
    a_sig: &Signal,
    epsilon: f64,
    q_sig: &Signal,
    t_grid: &[f64],
    step: f64,
    tol: f64,
) -> Result<ComparisonReport> {
    if !(epsilon > 0.0) {
        bail!(Validation, "epsilon must be positive, got {epsilon}");
    }
    let (n, m) = a_sig.shape();
    if n != m || q_sig.shape() != (n, n) {
        bail!(
            Validation,
            "A(t) is {n}x{m} and Q(t) is {:?}; both must be the same square shape",
            q_sig.shape()
        );
    }
    if t_grid.is_empty() {
        bail!(Validation, "comparison grid must not be empty");
    }
    let eps_i = Mat::identity(n).scale(epsilon);
    let (mut worst_time, mut worst_value) = (t_grid[0], f64::NEG_INFINITY);
    let mut lambda_m = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let a = a_sig.eval(t)?;
        let q = q_sig.eval(t)?;
        let v = lambda_max_sym(&(&(&a + &eps_i) - &q));
        if v > worst_value {
            worst_value = v;
            worst_time = t;
        }
        lambda_m.push(lambda_max_sym(&q));
    }
    let horizon = t_grid.iter().copied().fold(0.0, f64::max);
    let lm = q_sig.map(1, 1, |q| Mat::scalar(2.0 * lambda_max_sym(q)));
    let a_maj = Mat::scalar(-2.0 * epsilon);
    let spec = SystemSpec::linear(OrderSpec::uniform(alpha, 1)?, a_maj.clone(), vec![1.0])
        .with_q(lm.clone());
    let spec = if alpha > 1.0 {
        spec.with_xdot0(vec![0.0])
    } else {
        spec
    };
    let majorant = solve_ivp(&spec, horizon, step)?;
    let majorant_verdict = asymptotic_verdict(&majorant, 0.1, 1e-2, majorant.meta.ceiling);
    let majorant_q = q_certificate(
        &[alpha],
        &a_maj,
        &lm,
        &uniform_grid(horizon, t_grid.len().min(100)),
        1e-8,
    )
    .ok();
    Ok(ComparisonReport {
        holds: worst_value <= tol,
        worst_time,
        worst_value,
        tol,
        grid: t_grid.to_vec(),
        lambda_m,
        majorant,
        majorant_verdict,
        majorant_q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::uniform_grid;
    use crate::signal::Waveform;

    #[test]
    fn diagonal_constant_case() {
        let a = Signal::constant(Mat::identity(2).scale(-2.0));
        let q = Signal::constant(Mat::identity(2));
        let r = comparison_check(0.8, &a, 1.0, &q, &uniform_grid(10.0, 20), 0.01, 1e-12).unwrap();
        assert!(r.holds);
        assert!((r.worst_value + 2.0).abs() < 1e-12);
        assert!(r.lambda_m.iter().all(|&l| (l - 1.0).abs() < 1e-12));
    }

    #[test]
    fn signum_test_matches_scalar_ordering() {
        for &(a, eps, q, expect) in &[
            (-1.0, 0.5, 0.0, true),
            (-1.0, 0.5, -0.6, false),
            (0.3, 0.1, 0.5, true),
        ] {
            let r = comparison_check(
                0.5,
                &Signal::constant(Mat::scalar(a)),
                eps,
                &Signal::constant(Mat::scalar(q)),
                &[1.0, 2.0],
                0.1,
                0.0,
            )
            .unwrap();
            assert_eq!(r.holds, a + eps - q <= 0.0);
            assert_eq!(r.holds, expect);
        }
    }

    #[test]
    fn equality_pattern_and_decaying_majorant() {
        let s = Waveform::Sin {
            amp: 0.1,
            omega: 1.0,
            phase: 0.0,
        };
        let a = Signal::waveforms(
            1,
            1,
            vec![Waveform::Sum {
                terms: vec![Waveform::Const { value: -1.0 }, s.clone()],
            }],
        )
        .unwrap();
        let q = Signal::waveforms(1, 1, vec![s]).unwrap();
        let r = comparison_check(0.9, &a, 1.0, &q, &uniform_grid(60.0, 120), 0.01, 1e-12).unwrap();
        assert!(r.holds && r.worst_value.abs() < 1e-12);
        assert!((r.lambda_m[9] - 0.1 * (5.0f64).sin()).abs() < 1e-12);

        let decay = Signal::waveforms(
            1,
            1,
            vec![Waveform::Exp {
                amp: 0.5,
                rate: -1.0,
            }],
        )
        .unwrap();
        let r = comparison_check(
            0.8,
            &Signal::constant(Mat::scalar(-2.0)),
            1.0,
            &decay,
            &uniform_grid(200.0, 200),
            0.02,
            0.0,
        )
        .unwrap();
        assert!(r.holds);
        assert_eq!(r.majorant_verdict, Verdict::ConvergesToZero);
    }
}
