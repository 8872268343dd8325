//! Fractional adaptive error models.
//!
//! Type I: `e = φᵀw + ν`, `D^α φ = −γ e w`.
//! Type II (scalar error `e`): `D^α e = −a e + wᵀφ + ν`, `D^β φ = −e w`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::certificates::{certify, pe_estimate, CertificateReport, CertifyOptions, PeEstimate};
use crate::error::{bail, Result};
use crate::linalg::{sym_eigenvalues, Mat};
use crate::quad::{integrate, QuadOptions};
use crate::signal::Signal;
use crate::solver::{
    asymptotic_verdict, solve_ivp, Nonlinearity, OrderSpec, SystemSpec, Trajectory, Verdict,
};

/// `ε = PE_SHARE · ε_PE` in the type-I split.
pub const PE_SHARE: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ModelType {
    #[cfg_attr(feature = "serde", serde(rename = "type_i"))]
    TypeI,
    #[cfg_attr(feature = "serde", serde(rename = "type_ii"))]
    TypeII,
}

/// Adaptation gain: positive scalar or symmetric positive definite matrix.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(untagged))]
pub enum Gain {
    Scalar(f64),
    Matrix(Mat),
}

impl Default for Gain {
    fn default() -> Self {
        Gain::Scalar(1.0)
    }
}

impl Gain {
    fn validate(&self, n: usize) -> Result<()> {
        match self {
            Gain::Scalar(g) if !(*g > 0.0 && g.is_finite()) => {
                bail!(Validation, "gamma must be positive, got {g}")
            }
            Gain::Matrix(m) => {
                if m.shape() != (n, n) {
                    bail!(
                        Validation,
                        "gamma matrix must be {n}x{n}, got {}x{}",
                        m.rows(),
                        m.cols()
                    );
                }
                if (&m.transpose() - m).max_abs() > 1e-12 * m.max_abs().max(1.0) {
                    bail!(Validation, "gamma matrix must be symmetric");
                }
                if !(sym_eigenvalues(m)[0] > 0.0) {
                    bail!(Validation, "gamma matrix must be positive definite");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn as_matrix(&self, n: usize) -> Mat {
        match self {
            Gain::Scalar(g) => Mat::identity(n).scale(*g),
            Gain::Matrix(m) => m.clone(),
        }
    }

    fn min_eig(&self) -> f64 {
        match self {
            Gain::Scalar(g) => *g,
            Gain::Matrix(m) => sym_eigenvalues(m)[0],
        }
    }
}

#[derive(Clone, Debug)]
pub struct AdaptiveScenario {
    pub name: String,
    pub model: ModelType,
    /// Information signal, `n × 1`.
    pub w: Signal,
    /// Scalar perturbation.
    pub nu: Option<Signal>,
    /// Orders of the parameter law (`β` for type II), one per component of `φ`.
    pub orders: OrderSpec,
    /// Order `α` of the scalar error equation (type II).
    pub e_order: Option<f64>,
    pub gamma: Gain,
    /// Use `γ / (1 + wᵀw)` in place of `γ` (type I).
    pub normalize: bool,
    /// Decay rate `a` of the scalar error equation (type II).
    pub a: Option<f64>,
    pub phi0: Vec<f64>,
    pub phidot0: Option<Vec<f64>>,
    pub e0: Option<f64>,
    pub edot0: Option<f64>,
    pub horizon: f64,
    pub step: f64,
    /// PE window lengths to try.
    pub pe_windows: Vec<f64>,
    /// Horizon and grid size for the certificate chain.
    pub cert_horizon: f64,
    pub cert_grid: usize,
    pub tail_fraction: f64,
    pub tol_zero: f64,
}

impl AdaptiveScenario {
    /// Type-I scenario with default numerical settings.
    pub fn type_i(w: Signal, orders: OrderSpec, phi0: Vec<f64>, horizon: f64, step: f64) -> Self {
        Self {
            name: String::from("scenario"),
            model: ModelType::TypeI,
            w,
            nu: None,
            orders,
            e_order: None,
            gamma: Gain::default(),
            normalize: false,
            a: None,
            phi0,
            phidot0: None,
            e0: None,
            edot0: None,
            horizon,
            step,
            pe_windows: vec![2.0 * core::f64::consts::PI],
            cert_horizon: horizon.min(50.0),
            cert_grid: 50,
            tail_fraction: 0.1,
            tol_zero: 1e-2,
        }
    }

    /// Type-II scenario with scalar error and default numerical settings.
    pub fn type_ii(
        w: Signal,
        a: f64,
        alpha: f64,
        beta: OrderSpec,
        e0: f64,
        phi0: Vec<f64>,
        horizon: f64,
        step: f64,
    ) -> Self {
        Self {
            model: ModelType::TypeII,
            e_order: Some(alpha),
            a: Some(a),
            e0: Some(e0),
            ..Self::type_i(w, beta, phi0, horizon, step)
        }
    }

    pub fn dim(&self) -> usize {
        self.w.shape().0
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if self.w.shape().1 != 1 || n == 0 {
            bail!(
                Validation,
                "w must be a non-empty column vector signal, got shape {:?}",
                self.w.shape()
            );
        }
        if self.orders.len() != n {
            bail!(
                Validation,
                "orders has {} entries but w has {n}",
                self.orders.len()
            );
        }
        if self.phi0.len() != n {
            bail!(
                Validation,
                "phi0 has {} entries but w has {n}",
                self.phi0.len()
            );
        }
        if let Some(nu) = &self.nu {
            if nu.shape() != (1, 1) {
                bail!(Validation, "nu must be scalar, got shape {:?}", nu.shape());
            }
        }
        if !(self.horizon > 0.0 && self.step > 0.0 && self.step <= self.horizon) {
            bail!(
                Validation,
                "need 0 < step <= horizon, got step {} and horizon {}",
                self.step,
                self.horizon
            );
        }
        if !(self.cert_horizon > 0.0) || self.cert_grid == 0 {
            bail!(Validation, "certificate horizon and grid must be positive");
        }
        if self.pe_windows.is_empty() {
            bail!(Validation, "pe_windows must not be empty");
        }
        self.gamma.validate(n)?;
        match self.model {
            ModelType::TypeI => {
                if !self.normalize && !self.w.is_uniformly_bounded() {
                    bail!(
                        Validation,
                        "w is not bounded: declare a bound or set normalize"
                    );
                }
            }
            ModelType::TypeII => {
                if self.a.is_none() {
                    bail!(Validation, "type-II model needs the error dynamics `a`");
                }
                let alpha = self.e_order.ok_or_else(|| {
                    crate::Error::Validation(String::from("type-II model needs e_order"))
                })?;
                OrderSpec::new(vec![alpha])?;
                if self.gamma != Gain::Scalar(1.0) || self.normalize {
                    bail!(
                        Validation,
                        "type-II model uses unit gain without normalization"
                    );
                }
                if !self.w.is_uniformly_bounded() {
                    bail!(Validation, "w is not bounded: declare a bound");
                }
            }
        }
        Ok(())
    }
}

/// How the coefficient matrix was split into a constant part and `Q(t)`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SplitInfo {
    pub a: Mat,
    /// `ε` of the type-I split, absent when `w` is not PE.
    pub epsilon: Option<f64>,
    /// Time average of `w` used for the type-II `Λ`.
    pub w_mean: Option<Vec<f64>>,
    pub description: String,
}

#[derive(Clone, Debug)]
pub struct BuiltModel {
    pub spec: SystemSpec,
    pub split: SplitInfo,
    pub pe: PeEstimate,
}

fn gain_scale(normalize: bool, w: &Mat) -> f64 {
    if normalize {
        let ww: f64 = w.as_slice().iter().map(|x| x * x).sum();
        1.0 / (1.0 + ww)
    } else {
        1.0
    }
}

/// State `φ`, coefficient `−Γ w wᵀ` split as `A = −εI`, `Q = −Γ w wᵀ + εI`
/// with `ε = 0.9 · ε_PE` of the effective information signal.
pub fn build_error_model_1(scn: &AdaptiveScenario) -> Result<BuiltModel> {
    if scn.model != ModelType::TypeI {
        bail!(Validation, "scenario `{}` is not a type-I model", scn.name);
    }
    scn.validate()?;
    let n = scn.dim();
    let normalize = scn.normalize;
    let g = scn.gamma.as_matrix(n);
    let gmin = scn.gamma.min_eig();
    let w_eff = scn
        .w
        .map(n, 1, move |w| w.scale(gain_scale(normalize, w).sqrt()));
    let pe = pe_estimate(&w_eff, &scn.pe_windows, scn.horizon, 1e-10)?;
    let epsilon = pe.pe.then_some(PE_SHARE * gmin * pe.epsilon);
    let eps = epsilon.unwrap_or(0.0);
    let gq = g.clone();
    let mut q = scn.w.map(n, n, move |w| {
        let wwt = w * &w.transpose();
        &(&gq * &wwt).scale(-gain_scale(normalize, w)) + &Mat::identity(n).scale(eps)
    });
    if let Some(b) = scn
        .w
        .declared_bound()
        .or_else(|| scn.w.bound(f64::INFINITY))
    {
        let span = g.norm2() * if normalize { 1.0 } else { b * b };
        // Scalar gain: the spectrum of Q lies in [ε − span, ε].
        q = q.with_bound(match scn.gamma {
            Gain::Scalar(_) => eps.max(span - eps),
            Gain::Matrix(_) => span + eps,
        });
    }
    let a = Mat::identity(n).scale(-eps);
    let mut spec = SystemSpec::linear(scn.orders.clone(), a.clone(), scn.phi0.clone()).with_q(q);
    if let Some(nu) = &scn.nu {
        let gf = g.clone();
        let forcing = scn.w.zip(nu, n, 1, move |w, v| {
            (&gf * w).scale(-gain_scale(normalize, w) * v[(0, 0)])
        });
        spec = spec.with_nu(forcing);
    }
    if scn.orders.needs_velocity() {
        spec = spec.with_xdot0(velocity(&scn.orders, scn.phidot0.as_deref())?);
    }
    let description = match epsilon {
        Some(e) => format!(
            "A = -{e:.6e} I, Q(t) = -gamma w w^T + {e:.6e} I (eps = {PE_SHARE} x PE estimate)"
        ),
        None => String::from("w is not PE: A = 0, Q(t) = -gamma w w^T (no stable split)"),
    };
    Ok(BuiltModel {
        spec,
        split: SplitInfo {
            a,
            epsilon,
            w_mean: None,
            description,
        },
        pe,
    })
}

/// Initial velocity: given entries for orders above 1, zero elsewhere.
fn velocity(orders: &OrderSpec, given: Option<&[f64]>) -> Result<Vec<f64>> {
    let n = orders.len();
    match given {
        None => Ok(vec![0.0; n]),
        Some(v) if v.len() == n => Ok(v
            .iter()
            .zip(orders.as_slice())
            .map(|(&x, &a)| if a > 1.0 { x } else { 0.0 })
            .collect()),
        Some(v) => bail!(Validation, "phidot0 has {} entries, expected {n}", v.len()),
    }
}

/// Time average of `w` over `[0, horizon]`.
fn signal_mean(w: &Signal, horizon: f64) -> Result<Vec<f64>> {
    let n = w.shape().0;
    let mut cuts = w.switch_times(horizon);
    cuts.push(horizon);
    let mut acc = vec![0.0; n];
    let mut lo = 0.0;
    for hi in cuts {
        let r = integrate(
            |t, out| {
                out.copy_from_slice(w.eval(t)?.as_slice());
                Ok(())
            },
            lo,
            hi,
            n,
            QuadOptions {
                max_intervals: 20_000,
                ..QuadOptions::with_tol(1e-10)
            },
        )?;
        for (a, v) in acc.iter_mut().zip(r.value) {
            *a += v;
        }
        lo = hi;
    }
    Ok(acc.into_iter().map(|v| v / horizon).collect())
}

fn block(a: f64, w: &[f64]) -> Mat {
    let n = w.len();
    let mut m = Mat::zeros(n + 1, n + 1);
    m[(0, 0)] = a;
    for (i, &wi) in w.iter().enumerate() {
        m[(0, i + 1)] = wi;
        m[(i + 1, 0)] = -wi;
    }
    m
}

/// State `(e, φ)`, coefficient `[[−a, wᵀ], [−w, 0]] = Λ + Q(t)` with `Λ` built
/// from the time average of `w`.
pub fn build_error_model_2(scn: &AdaptiveScenario) -> Result<BuiltModel> {
    if scn.model != ModelType::TypeII {
        bail!(Validation, "scenario `{}` is not a type-II model", scn.name);
    }
    scn.validate()?;
    let n = scn.dim();
    let a = scn.a.expect("validated");
    let alpha = scn.e_order.expect("validated");
    let mean = signal_mean(&scn.w, scn.horizon)?;
    let lambda = block(-a, &mean);
    let m2 = mean.clone();
    let q = scn.w.map(n + 1, n + 1, move |w| {
        let d: Vec<f64> = w.as_slice().iter().zip(&m2).map(|(x, m)| x - m).collect();
        block(0.0, &d)
    });
    let mut orders = vec![alpha];
    orders.extend_from_slice(scn.orders.as_slice());
    let orders = OrderSpec::new(orders)?;
    let mut x0 = vec![scn.e0.unwrap_or(0.0)];
    x0.extend_from_slice(&scn.phi0);
    let mut spec = SystemSpec::linear(orders.clone(), lambda.clone(), x0).with_q(q);
    if let Some(nu) = &scn.nu {
        spec = spec.with_nu(nu.map(n + 1, 1, move |v| {
            let mut out = Mat::zeros(n + 1, 1);
            out[(0, 0)] = v[(0, 0)];
            out
        }));
    }
    if orders.needs_velocity() {
        let mut v = vec![scn.edot0.unwrap_or(0.0)];
        v.extend(scn.phidot0.clone().unwrap_or_else(|| vec![0.0; n]));
        spec = spec.with_xdot0(velocity(&orders, Some(&v))?);
    }
    let pe = pe_estimate(&scn.w, &scn.pe_windows, scn.horizon, 1e-10)?;
    let description = format!("Lambda = [[-a, mean(w)^T], [-mean(w), 0]] with mean(w) = {mean:?}; Q(t) = [[0, (w - mean)^T], [-(w - mean), 0]]");
    Ok(BuiltModel {
        spec,
        split: SplitInfo {
            a: lambda,
            epsilon: None,
            w_mean: Some(mean),
            description,
        },
        pe,
    })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExperimentReport {
    pub name: String,
    pub model: ModelType,
    pub trajectory: Trajectory,
    /// Adaptation error on the trajectory grid.
    pub e: Vec<f64>,
    /// `‖φ(t)‖` on the trajectory grid.
    pub phi_norm: Vec<f64>,
    pub certificates: CertificateReport,
    pub pe: PeEstimate,
    pub split: SplitInfo,
    pub verdict_e: Verdict,
    pub verdict_phi: Verdict,
    pub tail_fraction: f64,
    pub tol_zero: f64,
    /// Convergence of `φ` is backed by a passing certificate.
    pub certified: bool,
}

fn scalar_trajectory(base: &Trajectory, values: &[f64]) -> Trajectory {
    Trajectory {
        times: base.times.clone(),
        values: values.iter().map(|&v| vec![v]).collect(),
        meta: base.meta.clone(),
        exact_reference: None,
    }
}

impl ExperimentReport {
    /// Recomputes `(verdict_e, verdict_phi)` from the stored series.
    pub fn recompute_verdicts(&self) -> (Verdict, Verdict) {
        let c = self.trajectory.meta.ceiling;
        (
            asymptotic_verdict(
                &scalar_trajectory(&self.trajectory, &self.e),
                self.tail_fraction,
                self.tol_zero,
                c,
            ),
            asymptotic_verdict(
                &scalar_trajectory(&self.trajectory, &self.phi_norm),
                self.tail_fraction,
                self.tol_zero,
                c,
            ),
        )
    }
}

/// Builds the model, estimates PE, certifies the split and simulates.
/// Certificate failures are reported, not raised.
pub fn run_scenario(scn: &AdaptiveScenario) -> Result<ExperimentReport> {
    let built = match scn.model {
        ModelType::TypeI => build_error_model_1(scn)?,
        ModelType::TypeII => build_error_model_2(scn)?,
    };
    let certificates = certify(
        &built.spec,
        &CertifyOptions::new(scn.cert_horizon, scn.cert_grid),
    )?;
    let traj = solve_ivp(&built.spec, scn.horizon, scn.step)?;
    let n = scn.dim();
    let mut e = Vec::with_capacity(traj.len());
    let mut phi_norm = Vec::with_capacity(traj.len());
    for (t, x) in traj.times.iter().zip(&traj.values) {
        match scn.model {
            ModelType::TypeI => {
                let w = scn.w.eval(*t)?;
                let nu = match &scn.nu {
                    Some(nu) => nu.eval_scalar(*t)?,
                    None => 0.0,
                };
                e.push(x.iter().zip(w.as_slice()).map(|(p, q)| p * q).sum::<f64>() + nu);
                phi_norm.push(x.iter().map(|v| v * v).sum::<f64>().sqrt());
            }
            ModelType::TypeII => {
                e.push(x[0]);
                phi_norm.push(x[1..=n].iter().map(|v| v * v).sum::<f64>().sqrt());
            }
        }
    }
    let certified = certificates.certified() && scn.nu.is_none();
    let mut report = ExperimentReport {
        name: scn.name.clone(),
        model: scn.model,
        trajectory: traj,
        e,
        phi_norm,
        certificates,
        pe: built.pe.clone(),
        split: built.split,
        verdict_e: Verdict::Inconclusive,
        verdict_phi: Verdict::Inconclusive,
        tail_fraction: scn.tail_fraction,
        tol_zero: scn.tol_zero,
        certified,
    };
    report.certificates.pe = Some(built.pe);
    let (ve, vp) = report.recompute_verdicts();
    report.verdict_e = ve;
    report.verdict_phi = vp;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DestabilizingReport {
    pub alpha: f64,
    pub phi0: f64,
    pub trajectory: Trajectory,
    /// `e = 1/(1 − φ)` on the grid.
    pub e: Vec<f64>,
    /// Closed-form `φ` for `α = 1`.
    pub exact: Option<Vec<f64>>,
    pub max_error: Option<f64>,
    /// `φ` strictly decreasing along the grid.
    pub monotone: bool,
}

/// `φ(t) = 1 − (3t + (1 − φ₀)³)^{1/3}` solves `φ' = −1/(1 − φ)²`.
pub fn destabilizing_exact(phi0: f64, t: f64) -> f64 {
    1.0 - (3.0 * t + (1.0 - phi0).powi(3)).cbrt()
}

/// `D^α φ = −1/(1 − φ)²`, the closed loop of `e = φw + 1`, `w = e`.
pub fn destabilizing_benchmark(
    alpha: f64,
    phi0: f64,
    t_end: f64,
    step: f64,
) -> Result<DestabilizingReport> {
    if !(phi0 < 1.0) {
        bail!(Validation, "phi0 must be below 1, got {phi0}");
    }
    let orders = OrderSpec::uniform(alpha, 1)?;
    let f = Nonlinearity::new(|x: &[f64]| vec![-1.0 / ((1.0 - x[0]) * (1.0 - x[0]))])
        .with_jacobian(|x: &[f64]| {
            let d = 1.0 - x[0];
            Mat::scalar(-2.0 / (d * d * d))
        });
    let mut spec = SystemSpec::linear(orders, Mat::zeros(1, 1), vec![phi0]).with_f(f);
    if alpha > 1.0 {
        spec = spec.with_xdot0(vec![0.0]);
    }
    let mut traj = solve_ivp(&spec, t_end, step)?;
    let phi = traj.component(0);
    let e = phi.iter().map(|p| 1.0 / (1.0 - p)).collect();
    let monotone = phi.windows(2).all(|w| w[1] < w[0]);
    let (exact, max_error) = if alpha == 1.0 {
        let ex: Vec<f64> = traj
            .times
            .iter()
            .map(|&t| destabilizing_exact(phi0, t))
            .collect();
        let err = ex
            .iter()
            .zip(&phi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        traj.exact_reference = Some(String::from("phi(t) = 1 - (3t + (1 - phi0)^3)^(1/3)"));
        (Some(ex), Some(err))
    } else {
        (None, None)
    };
    Ok(DestabilizingReport {
        alpha,
        phi0,
        trajectory: traj,
        e,
        exact,
        max_error,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::Waveform;
    use crate::spectral::sector_classify;

    fn sin_w() -> Signal {
        Signal::waveforms(
            1,
            1,
            vec![Waveform::Sin {
                amp: 1.0,
                omega: 1.0,
                phase: 0.0,
            }],
        )
        .unwrap()
    }

    #[test]
    fn constant_w_unit_order_is_exponential() {
        let mut scn = AdaptiveScenario::type_i(
            Signal::vector(&[1.0]),
            OrderSpec::uniform(1.0, 1).unwrap(),
            vec![2.0],
            5.0,
            1e-3,
        );
        scn.cert_horizon = 10.0;
        scn.cert_grid = 10;
        let r = run_scenario(&scn).unwrap();
        let last = r.trajectory.values.last().unwrap()[0];
        assert!((last - 2.0 * (-5.0f64).exp()).abs() < 1e-6);
        assert!((r.split.epsilon.unwrap() - 0.9).abs() < 1e-8);
        assert!(r.certified);
    }

    #[test]
    fn output_identity_without_perturbation() {
        let scn = AdaptiveScenario::type_i(
            sin_w(),
            OrderSpec::uniform(0.8, 1).unwrap(),
            vec![1.0],
            20.0,
            0.01,
        );
        let r = run_scenario(&scn).unwrap();
        for (k, &t) in r.trajectory.times.iter().enumerate() {
            assert_eq!(r.e[k], r.trajectory.values[k][0] * t.sin());
        }
        assert_eq!(r.recompute_verdicts(), (r.verdict_e, r.verdict_phi));
    }

    #[test]
    fn unbounded_w_requires_normalization() {
        let w = Signal::waveforms(
            1,
            1,
            vec![Waveform::Exp {
                amp: 1.0,
                rate: 0.1,
            }],
        )
        .unwrap();
        let mut scn =
            AdaptiveScenario::type_i(w, OrderSpec::uniform(0.8, 1).unwrap(), vec![1.0], 5.0, 0.01);
        assert!(matches!(
            build_error_model_1(&scn),
            Err(crate::Error::Validation(_))
        ));
        scn.normalize = true;
        let m = build_error_model_1(&scn).unwrap();
        for k in 0..50 {
            let t = k as f64 * 0.1;
            let q = m.spec.q.as_ref().unwrap().eval(t).unwrap();
            let eps = m.split.epsilon.unwrap_or(0.0);
            assert!((q[(0, 0)] - eps).abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn type_ii_block_structure() {
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
            vec![0.5],
            20.0,
            0.01,
        );
        let m = build_error_model_2(&scn).unwrap();
        for k in 0..40 {
            let t = 0.37 * k as f64;
            let full = &m.spec.a + &m.spec.q.as_ref().unwrap().eval(t).unwrap();
            assert_eq!(full[(1, 0)], -full[(0, 1)]);
            assert!((full[(0, 1)] - (2.0 + 0.05 * t.sin())).abs() < 1e-12);
        }
        assert!(sector_classify(0.9, &m.split.a, 1e-9).unwrap().is_stable());
        let mut bad = scn.clone();
        bad.a = None;
        assert!(build_error_model_2(&bad).is_err());
    }

    #[test]
    fn destabilizing_unit_order() {
        let r = destabilizing_benchmark(1.0, 0.0, 9.0, 1e-3).unwrap();
        assert!(r.max_error.unwrap() < 1e-6);
        assert!(r.monotone);
        assert!((r.e.last().unwrap() - 28f64.powf(-1.0 / 3.0)).abs() < 1e-6);
        assert!(destabilizing_benchmark(1.0, 1.0, 1.0, 0.1).is_err());
    }
}
