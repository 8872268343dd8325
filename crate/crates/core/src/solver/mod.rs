//! Caputo fractional initial-value problems
//!
//! ```text
//! D^{αᵢ} xᵢ = ((A + Q(t)) x + f(x) + ν(t))ᵢ,   0 < αᵢ < 2
//! ```
//!
//! with `xᵢ(0) = x₀ᵢ` and, for `αᵢ > 1`, `ẋᵢ(0) = ẋ₀ᵢ`.

mod abm;
mod lp;
mod verdict;

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{bail, Result};
use crate::linalg::Mat;
use crate::signal::Signal;

pub use abm::{solve_ivp, solve_ivp_with, SolverOptions, DEFAULT_CEILING, DEFAULT_CORRECTOR_ITERS};
pub use lp::{lp_fixed_point, LpOptions, LpResult};
pub use verdict::{asymptotic_verdict, Verdict};

/// Per-component Caputo orders, each in `(0, 2)`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct OrderSpec(Vec<f64>);

impl OrderSpec {
    pub fn new(orders: Vec<f64>) -> Result<Self> {
        if orders.is_empty() {
            bail!(Validation, "at least one derivative order is required");
        }
        for (i, &a) in orders.iter().enumerate() {
            if !(a > 0.0 && a < 2.0) {
                bail!(
                    Validation,
                    "order alpha[{i}] = {a} is outside the admissible range (0, 2)"
                );
            }
        }
        Ok(Self(orders))
    }

    pub fn uniform(alpha: f64, n: usize) -> Result<Self> {
        Self::new(vec![alpha; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `α_M = max αᵢ`.
    pub fn alpha_max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_commensurate(&self) -> bool {
        self.0.iter().all(|&a| a == self.0[0])
    }

    /// True when some component needs an initial velocity.
    pub fn needs_velocity(&self) -> bool {
        self.0.iter().any(|&a| a > 1.0)
    }
}

/// Monomial `coeff · Π x_j^{powers[j]}` contributing to component `output`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct PolyTerm {
    pub output: usize,
    pub coeff: f64,
    pub powers: Vec<u32>,
}

pub type VectorField = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type JacobianFn = Arc<dyn Fn(&[f64]) -> Mat + Send + Sync>;

/// State nonlinearity `f(x)` with optional local Lipschitz data.
#[derive(Clone)]
pub struct Nonlinearity {
    f: VectorField,
    jacobian: Option<JacobianFn>,
    /// `(r, L(r))`: `f` is `L(r)`-Lipschitz on the ball of radius `r`.
    pub lipschitz: Option<(f64, f64)>,
    polynomial: Option<Vec<PolyTerm>>,
}

impl core::fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Nonlinearity")
            .field("lipschitz", &self.lipschitz)
            .field("polynomial", &self.polynomial)
            .field("analytic_jacobian", &self.jacobian.is_some())
            .finish()
    }
}

impl Nonlinearity {
    pub fn new(f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            jacobian: None,
            lipschitz: None,
            polynomial: None,
        }
    }

    pub fn with_jacobian(mut self, j: impl Fn(&[f64]) -> Mat + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Arc::new(j));
        self
    }

    pub fn with_lipschitz(mut self, r: f64, l: f64) -> Self {
        self.lipschitz = Some((r, l));
        self
    }

    /// Polynomial vector field on `R^n` with analytic Jacobian.
    pub fn polynomial(n: usize, terms: Vec<PolyTerm>) -> Result<Self> {
        for (k, t) in terms.iter().enumerate() {
            if t.output >= n || t.powers.len() != n {
                bail!(
                    Validation,
                    "polynomial term {k} does not fit a {n}-dimensional state"
                );
            }
            if !t.coeff.is_finite() {
                bail!(
                    Validation,
                    "polynomial term {k} has a non-finite coefficient"
                );
            }
        }
        let tf = terms.clone();
        let tj = terms.clone();
        let f = move |x: &[f64]| {
            let mut out = vec![0.0; n];
            for t in &tf {
                out[t.output] += t.coeff
                    * t.powers
                        .iter()
                        .zip(x)
                        .map(|(&p, &xi)| xi.powi(p as i32))
                        .product::<f64>();
            }
            out
        };
        let jac = move |x: &[f64]| {
            let mut j = Mat::zeros(n, n);
            for t in &tj {
                for (c, &pc) in t.powers.iter().enumerate() {
                    if pc == 0 {
                        continue;
                    }
                    let mut v = t.coeff * pc as f64;
                    for (k, (&p, &xk)) in t.powers.iter().zip(x).enumerate() {
                        let e = if k == c { p - 1 } else { p };
                        v *= xk.powi(e as i32);
                    }
                    j[(t.output, c)] += v;
                }
            }
            j
        };
        let mut nl = Self::new(f).with_jacobian(jac);
        nl.polynomial = Some(terms);
        Ok(nl)
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        (self.f)(x)
    }

    pub fn jacobian(&self) -> Option<&JacobianFn> {
        self.jacobian.as_ref()
    }

    pub fn field(&self) -> &VectorField {
        &self.f
    }

    pub fn polynomial_terms(&self) -> Option<&[PolyTerm]> {
        self.polynomial.as_deref()
    }
}

/// A complete fractional IVP.
#[derive(Clone, Debug)]
pub struct SystemSpec {
    pub orders: OrderSpec,
    pub a: Mat,
    pub q: Option<Signal>,
    pub nu: Option<Signal>,
    pub f: Option<Nonlinearity>,
    pub x0: Vec<f64>,
    pub xdot0: Option<Vec<f64>>,
}

impl SystemSpec {
    /// Linear autonomous system `D^α x = A x`.
    pub fn linear(orders: OrderSpec, a: Mat, x0: Vec<f64>) -> Self {
        Self {
            orders,
            a,
            q: None,
            nu: None,
            f: None,
            x0,
            xdot0: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    pub fn with_q(mut self, q: Signal) -> Self {
        self.q = Some(q);
        self
    }

    pub fn with_nu(mut self, nu: Signal) -> Self {
        self.nu = Some(nu);
        self
    }

    pub fn with_f(mut self, f: Nonlinearity) -> Self {
        self.f = Some(f);
        self
    }

    pub fn with_xdot0(mut self, v: Vec<f64>) -> Self {
        self.xdot0 = Some(v);
        self
    }

    /// Checks dimensions, initial data and the `f(0) = 0` requirement of a
    /// Lipschitz declaration.
    pub fn validate(&self) -> Result<()> {
        let n = self.x0.len();
        if n == 0 {
            bail!(Validation, "x0 must not be empty");
        }
        if self.orders.len() != n {
            bail!(
                Validation,
                "orders has {} entries but x0 has {n}",
                self.orders.len()
            );
        }
        if self.a.shape() != (n, n) {
            bail!(
                Validation,
                "A is {}x{} but the state has dimension {n}",
                self.a.rows(),
                self.a.cols()
            );
        }
        if !self.a.is_finite() || !self.x0.iter().all(|v| v.is_finite()) {
            bail!(Validation, "A and x0 must be finite");
        }
        if let Some(q) = &self.q {
            if q.shape() != (n, n) {
                bail!(
                    Validation,
                    "Q has shape {:?}, expected ({n}, {n})",
                    q.shape()
                );
            }
        }
        if let Some(nu) = &self.nu {
            if nu.shape() != (n, 1) {
                bail!(
                    Validation,
                    "nu has shape {:?}, expected ({n}, 1)",
                    nu.shape()
                );
            }
        }
        match (&self.xdot0, self.orders.needs_velocity()) {
            (None, true) => bail!(Validation, "xdot0 is required because some order exceeds 1"),
            (Some(_), false) => bail!(
                Validation,
                "xdot0 is only meaningful when some order exceeds 1"
            ),
            (Some(v), true) => {
                if v.len() != n {
                    bail!(Validation, "xdot0 has {} entries, expected {n}", v.len());
                }
                for (i, (&vi, &ai)) in v.iter().zip(self.orders.as_slice()).enumerate() {
                    if !vi.is_finite() {
                        bail!(Validation, "xdot0[{i}] is not finite");
                    }
                    if ai <= 1.0 && vi != 0.0 {
                        bail!(
                            Validation,
                            "xdot0[{i}] must be 0 because alpha[{i}] = {ai} <= 1"
                        );
                    }
                }
            }
            (None, false) => {}
        }
        if let Some(f) = &self.f {
            let f0 = f.eval(&vec![0.0; n]);
            if f0.len() != n {
                bail!(Validation, "f maps R^{n} to R^{}", f0.len());
            }
            if let Some((r, l)) = f.lipschitz {
                if !(r > 0.0 && l >= 0.0) {
                    bail!(
                        Validation,
                        "Lipschitz declaration needs r > 0 and L >= 0, got ({r}, {l})"
                    );
                }
                if f0.iter().any(|v| v.abs() > 1e-12) {
                    bail!(Validation, "a Lipschitz declaration requires f(0) = 0");
                }
            }
        }
        Ok(())
    }

    /// Right-hand side `(A + Q(t)) x + f(x) + ν(t)`.
    pub fn rhs(&self, t: f64, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.a.mul_vec_into(x, out);
        if let Some(q) = &self.q {
            let qm = q.eval(t)?;
            for (o, v) in out.iter_mut().zip(qm.mul_vec(x)) {
                *o += v;
            }
        }
        if let Some(f) = &self.f {
            for (o, v) in out.iter_mut().zip(f.eval(x)) {
                *o += v;
            }
        }
        if let Some(nu) = &self.nu {
            for (o, v) in out.iter_mut().zip(nu.eval(t)?.as_slice()) {
                *o += v;
            }
        }
        Ok(())
    }

    /// Every switch time of `Q` and `ν` in `(0, until)`.
    pub fn switch_times(&self, until: f64) -> Vec<f64> {
        let mut s: Vec<f64> = Vec::new();
        if let Some(q) = &self.q {
            s.extend(q.switch_times(until));
        }
        if let Some(nu) = &self.nu {
            s.extend(nu.switch_times(until));
        }
        s.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        s.dedup();
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolverMeta {
    pub method: String,
    pub step: f64,
    pub corrector_iters: usize,
    pub uniform_grid: bool,
    pub switch_times: Vec<f64>,
    /// Short-memory window length, if truncation was requested.
    pub memory_window: Option<f64>,
    pub ceiling: f64,
    /// Time at which the state norm first exceeded the ceiling.
    pub diverged_at: Option<f64>,
}

/// Sampled solution.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub meta: SolverMeta,
    pub exact_reference: Option<String>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn diverged(&self) -> bool {
        self.meta.diverged_at.is_some()
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    /// Component `i` over the grid.
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[i]).collect()
    }

    /// Euclidean norm of the state at each grid point.
    pub fn norms(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
            .collect()
    }

    /// Index of the grid point closest to `t`.
    pub fn index_near(&self, t: f64) -> usize {
        let i = self.times.partition_point(|&s| s < t);
        if i == 0 {
            return 0;
        }
        if i >= self.times.len() {
            return self.times.len() - 1;
        }
        if (self.times[i] - t).abs() < (t - self.times[i - 1]).abs() {
            i
        } else {
            i - 1
        }
    }

    /// Linear interpolation of the state at `t` (clamped to the grid).
    pub fn at(&self, t: f64) -> Vec<f64> {
        let i = self.times.partition_point(|&s| s <= t);
        if i == 0 {
            return self.values[0].clone();
        }
        if i >= self.times.len() {
            return self.values[self.times.len() - 1].clone();
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let w = (t - t0) / (t1 - t0);
        self.values[i - 1]
            .iter()
            .zip(&self.values[i])
            .map(|(a, b)| a + w * (b - a))
            .collect()
    }
}

/// Free response `E_α(t^α A) x₀ + t E_{α,2}(t^α A) ẋ₀` of a commensurate
/// linear system.
pub fn free_response(
    alpha: f64,
    a: &Mat,
    x0: &[f64],
    xdot0: Option<&[f64]>,
    t: f64,
) -> Result<Vec<f64>> {
    let ml = crate::ml::MatrixMl::new(a)?;
    let mut x = ml.eval(alpha, 1.0, t)?.mul_vec(x0);
    if let Some(v) = xdot0 {
        let e2 = ml.eval(alpha, 2.0, t)?.mul_vec(v);
        for (xi, ei) in x.iter_mut().zip(e2) {
            *xi += t * ei;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_spec_bounds() {
        assert!(OrderSpec::new(vec![0.5, 2.5]).is_err());
        assert!(OrderSpec::new(vec![0.0]).is_err());
        let o = OrderSpec::new(vec![0.6, 1.2]).unwrap();
        assert_eq!(o.alpha_max(), 1.2);
        assert!(o.needs_velocity());
        assert!(!o.is_commensurate());
    }

    #[test]
    fn validation_rules() {
        let o = OrderSpec::new(vec![1.5]).unwrap();
        let s = SystemSpec::linear(o.clone(), Mat::from_rows(&[[-1.0]]).unwrap(), vec![1.0]);
        assert!(s.validate().is_err());
        assert!(s.clone().with_xdot0(vec![0.0]).validate().is_ok());
        let o = OrderSpec::new(vec![0.5]).unwrap();
        let s = SystemSpec::linear(o, Mat::from_rows(&[[-1.0]]).unwrap(), vec![1.0]);
        assert!(s.clone().with_xdot0(vec![0.0]).validate().is_err());
        let shifted = Nonlinearity::new(|x: &[f64]| vec![x[0] + 1.0]).with_lipschitz(1.0, 1.0);
        assert!(s.clone().with_f(shifted).validate().is_err());
        assert!(s.with_q(Signal::zero(2, 2)).validate().is_err());
    }

    #[test]
    fn polynomial_field_and_jacobian() {
        let nl = Nonlinearity::polynomial(
            2,
            vec![
                PolyTerm {
                    output: 0,
                    coeff: 0.5,
                    powers: vec![2, 1],
                },
                PolyTerm {
                    output: 1,
                    coeff: -1.0,
                    powers: vec![0, 3],
                },
            ],
        )
        .unwrap();
        let x = [2.0, 3.0];
        assert_eq!(nl.eval(&x), vec![6.0, -27.0]);
        let j = (nl.jacobian().unwrap())(&x);
        assert_eq!(j, Mat::from_rows(&[[6.0, 2.0], [0.0, -27.0]]).unwrap());
    }
}
