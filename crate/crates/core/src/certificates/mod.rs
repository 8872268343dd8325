//! Quantitative robustness certificates for perturbed fractional systems.
//!
//! All suprema over `t ≥ 0` are computed on `[0, horizon]`. Integrals of the
//! kernel norm carry the `[horizon, ∞)` part explicitly.

mod comparison;
mod pe;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{bail, Error, Result};
use crate::linalg::Mat;
use crate::ml::{kernel_scalar, MatrixMl};
use crate::quad::{integrate, integrate_from_origin, integrate_tail, QuadOptions};
use crate::signal::Signal;
use crate::solver::{lp_fixed_point, LpOptions, SystemSpec};
use crate::spectral::{sector_classify, SectorVerdict, DEFAULT_TOL_ARG};

pub use comparison::{comparison_check, ComparisonReport};
pub use pe::{
    pe_estimate, pulse_margin, pulse_search, PeCandidate, PeEstimate, Pulse, PulseSearch,
};

pub const DEFAULT_QUAD_TOL: f64 = 1e-8;
/// `q` must stay below `1 − DEFAULT_GRID_SAFETY` to be certified.
pub const DEFAULT_GRID_SAFETY: f64 = 1e-3;
const MAX_INTERVALS: usize = 20_000;

/// Matrix norm used for kernel and perturbation sizes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MatrixNorm {
    /// Operator 2-norm.
    #[default]
    Spectral,
    /// Max row sum (operator ∞-norm).
    MaxRowSum,
}

impl MatrixNorm {
    pub fn apply(self, m: &Mat) -> f64 {
        match self {
            Self::Spectral => m.norm2(),
            Self::MaxRowSum => m.norm_inf(),
        }
    }
}

pub(crate) fn quad_opts(tol: f64) -> QuadOptions {
    QuadOptions {
        abs_tol: tol,
        rel_tol: tol,
        max_intervals: MAX_INTERVALS,
    }
}

/// Variation-of-constants kernel `K(τ)`.
///
/// Commensurate orders use `τ^{α−1} E_{α,α}(τ^α A)`. Mixed orders use the
/// diagonal kernel `diag(τ^{αᵢ−1} E_{αᵢ,αᵢ}(aᵢᵢ τ^{αᵢ}))`, the split in which
/// the off-diagonal part of `A` is treated as perturbation.
pub(crate) enum Kernel {
    Matrix { alpha: f64, ml: MatrixMl },
    Diagonal { parts: Vec<(f64, f64)> },
}

impl Kernel {
    /// A single order applies to every component.
    pub(crate) fn new(orders: &[f64], a: &Mat, tol_arg: f64) -> Result<Self> {
        let n = a.rows();
        let broadcast;
        let orders = if orders.len() == 1 && a.is_square() {
            broadcast = vec![orders[0]; n];
            &broadcast[..]
        } else {
            orders
        };
        if orders.is_empty() || a.shape() != (orders.len(), orders.len()) {
            bail!(
                Validation,
                "order vector of length {} does not match A ({}x{})",
                orders.len(),
                a.rows(),
                a.cols()
            );
        }
        for &al in orders {
            if !(al > 0.0 && al < 2.0) {
                bail!(Domain, "order must lie in (0, 2), got {al}");
            }
        }
        if orders.iter().all(|&al| al == orders[0]) {
            let alpha = orders[0];
            let verdict = sector_classify(alpha, a, tol_arg)?;
            if !verdict.is_stable() {
                bail!(Divergence, "A is not in the stable sector for alpha = {alpha}; the kernel is not integrable");
            }
            Ok(Self::Matrix {
                alpha,
                ml: MatrixMl::new(a)?,
            })
        } else {
            let parts: Vec<(f64, f64)> = orders.iter().copied().zip(a.diag()).collect();
            if let Some(i) = parts.iter().position(|&(_, d)| !(d < 0.0)) {
                bail!(Divergence, "diagonal entry a[{i}][{i}] = {} is not stable; the mixed-order kernel is not integrable", parts[i].1);
            }
            Ok(Self::Diagonal { parts })
        }
    }

    pub(crate) fn dim(&self) -> usize {
        match self {
            Self::Matrix { ml, .. } => ml.dim(),
            Self::Diagonal { parts } => parts.len(),
        }
    }

    /// Smallest order: sets the origin singularity and the slowest tail decay.
    pub(crate) fn min_alpha(&self) -> f64 {
        match self {
            Self::Matrix { alpha, .. } => *alpha,
            Self::Diagonal { parts } => parts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
        }
    }

    pub(crate) fn eval(&self, tau: f64) -> Result<Mat> {
        match self {
            Self::Matrix { alpha, ml } => ml.kernel(*alpha, tau),
            Self::Diagonal { parts } => {
                let d: Vec<f64> = parts
                    .iter()
                    .map(|&(al, a)| kernel_scalar(al, a, tau))
                    .collect::<Result<_>>()?;
                Ok(Mat::from_diag(&d))
            }
        }
    }
}

/// `C(α, A) = sup_t ∫₀ᵗ ‖K(τ)‖ dτ = ∫₀^∞ ‖K(τ)‖ dτ`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CValue {
    /// `head + tail`.
    pub value: f64,
    /// `∫₀^horizon ‖K‖`.
    pub head: f64,
    /// `∫_horizon^∞ ‖K‖`, integrated after `τ = horizon·s^{−1/α}`.
    pub tail: f64,
    /// Combined quadrature error estimate.
    pub error: f64,
    pub horizon: f64,
    pub norm: MatrixNorm,
}

pub fn c_of_alpha_a(orders: &[f64], a: &Mat, horizon: f64, quad_tol: f64) -> Result<CValue> {
    c_of_alpha_a_with(orders, a, horizon, quad_tol, MatrixNorm::Spectral)
}

pub fn c_of_alpha_a_with(
    orders: &[f64],
    a: &Mat,
    horizon: f64,
    quad_tol: f64,
    norm: MatrixNorm,
) -> Result<CValue> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        bail!(
            Validation,
            "horizon must be positive and finite, got {horizon}"
        );
    }
    let k = Kernel::new(orders, a, DEFAULT_TOL_ARG)?;
    kernel_norm_integral(&k, horizon, quad_tol, norm)
}

pub(crate) fn kernel_norm_integral(
    k: &Kernel,
    horizon: f64,
    quad_tol: f64,
    norm: MatrixNorm,
) -> Result<CValue> {
    let p = k.min_alpha();
    let f = |tau: f64, out: &mut [f64]| {
        out[0] = norm.apply(&k.eval(tau)?);
        Ok(())
    };
    let head = integrate_from_origin(f, horizon, p, 1, quad_opts(quad_tol))?;
    let tail = integrate_tail(f, horizon, p, 1, quad_opts(quad_tol))?;
    Ok(CValue {
        value: head.value[0] + tail.value[0],
        head: head.value[0],
        tail: tail.value[0],
        error: head.error + tail.error,
        horizon,
        norm,
    })
}

/// `q = sup_t ‖∫₀ᵗ K(τ) Q(t−τ) dτ‖` sampled on a time grid.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QCertificate {
    /// Max over the grid of `‖∫ K·Q‖`; decides `satisfied`.
    pub q: f64,
    /// Max over the grid of `∫ ‖K·Q‖` (informational, always `≥ q`).
    pub q_norm_integral: f64,
    /// Grid time attaining `q`.
    pub worst_time: f64,
    pub grid_len: usize,
    pub horizon: f64,
    pub grid_safety: f64,
    pub quad_error: f64,
    pub satisfied: bool,
    pub norm: MatrixNorm,
}

impl QCertificate {
    pub fn recompute_satisfied(&self) -> bool {
        self.q < 1.0 - self.grid_safety
    }
}

/// Uniform grid of `n` points on `(0, horizon]`.
pub fn uniform_grid(horizon: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| horizon * k as f64 / n as f64).collect()
}

pub fn q_certificate(
    orders: &[f64],
    a: &Mat,
    q: &Signal,
    t_grid: &[f64],
    quad_tol: f64,
) -> Result<QCertificate> {
    q_certificate_with(
        orders,
        a,
        q,
        t_grid,
        quad_tol,
        MatrixNorm::Spectral,
        DEFAULT_GRID_SAFETY,
    )
}

pub fn q_certificate_with(
    orders: &[f64],
    a: &Mat,
    q: &Signal,
    t_grid: &[f64],
    quad_tol: f64,
    norm: MatrixNorm,
    grid_safety: f64,
) -> Result<QCertificate> {
    let k = Kernel::new(orders, a, DEFAULT_TOL_ARG)?;
    let d = k.dim();
    if q.shape() != (d, d) {
        bail!(
            Validation,
            "Q has shape {:?}, expected ({d}, {d})",
            q.shape()
        );
    }
    if t_grid.is_empty() || t_grid.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
        bail!(
            Validation,
            "q grid must be a non-empty list of finite non-negative times"
        );
    }
    let horizon = t_grid.iter().copied().fold(0.0, f64::max);
    let switches = q.switch_times(horizon);
    let (mut best, mut best_t, mut best_int, mut qerr) = (0.0f64, t_grid[0], 0.0f64, 0.0f64);
    for &t in t_grid {
        let (v, vi, e) = convolution_norms(&k, q, t, &switches, quad_tol, norm)?;
        if v > best {
            best = v;
            best_t = t;
        }
        best_int = best_int.max(vi);
        qerr = qerr.max(e);
    }
    Ok(QCertificate {
        q: best,
        q_norm_integral: best_int,
        worst_time: best_t,
        grid_len: t_grid.len(),
        horizon,
        grid_safety,
        quad_error: qerr,
        satisfied: best < 1.0 - grid_safety,
        norm,
    })
}

/// `(‖∫₀ᵗ K(τ)Q(t−τ)dτ‖, ∫₀ᵗ ‖K(τ)Q(t−τ)‖dτ, error)`, splitting at the
/// switch times of `Q`.
fn convolution_norms(
    k: &Kernel,
    q: &Signal,
    t: f64,
    switches: &[f64],
    quad_tol: f64,
    norm: MatrixNorm,
) -> Result<(f64, f64, f64)> {
    if t == 0.0 {
        return Ok((0.0, 0.0, 0.0));
    }
    let d = k.dim();
    let dim = d * d + 1;
    let f = |tau: f64, out: &mut [f64]| -> Result<()> {
        let s = t - tau;
        let qm = q
            .eval(s.max(0.0))
            .map_err(|e| Error::Domain(format!("Q undefined at t = {s}: {e}")))?;
        let kq = &k.eval(tau)? * &qm;
        out[..d * d].copy_from_slice(kq.as_slice());
        out[d * d] = norm.apply(&kq);
        Ok(())
    };
    let mut cuts: Vec<f64> = switches
        .iter()
        .filter(|&&s| s < t)
        .map(|&s| t - s)
        .collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    cuts.push(t);
    let mut acc = vec![0.0; dim];
    let mut err = 0.0;
    let mut lo = 0.0;
    for &hi in &cuts {
        if hi <= lo {
            continue;
        }
        let r = if lo == 0.0 {
            integrate_from_origin(f, hi, k.min_alpha(), dim, quad_opts(quad_tol))?
        } else {
            integrate(f, lo, hi, dim, quad_opts(quad_tol))?
        };
        for (a, v) in acc.iter_mut().zip(&r.value) {
            *a += v;
        }
        err += r.error;
        lo = hi;
    }
    let m = Mat::from_vec(d, d, acc[..d * d].to_vec())?;
    Ok((norm.apply(&m), acc[d * d], err))
}

/// Small-gain test `sup_{t ≥ T} ‖Q(t)‖ < 1 / C(α, A)`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SmallGain {
    pub threshold: f64,
    pub sup_q: f64,
    pub t_from: f64,
    pub c: CValue,
    pub satisfied: bool,
}

impl SmallGain {
    pub fn recompute_satisfied(&self) -> bool {
        self.sup_q < self.threshold
    }
}

pub fn small_gain(
    orders: &[f64],
    a: &Mat,
    sup_q: f64,
    t_from: f64,
    horizon: f64,
    quad_tol: f64,
) -> Result<SmallGain> {
    if !(sup_q >= 0.0) {
        bail!(Validation, "sup ‖Q‖ must be non-negative, got {sup_q}");
    }
    let c = c_of_alpha_a(orders, a, horizon, quad_tol)?;
    let threshold = if c.value > 0.0 {
        1.0 / c.value
    } else {
        f64::INFINITY
    };
    Ok(SmallGain {
        threshold,
        sup_q,
        t_from,
        satisfied: sup_q < threshold,
        c,
    })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CertifyOptions {
    pub horizon: f64,
    /// Number of `q` grid points on `(0, horizon]`.
    pub grid: usize,
    pub quad_tol: f64,
    pub tol_arg: f64,
    pub grid_safety: f64,
    pub norm: MatrixNorm,
    /// Sample count for `sup ‖Q‖` when `Q` has no intrinsic bound.
    pub sup_samples: usize,
    /// Run the Lyapunov–Perron iteration with these settings to measure `μ`.
    pub lp: Option<LpOptions>,
}

impl CertifyOptions {
    pub fn new(horizon: f64, grid: usize) -> Self {
        Self {
            horizon,
            grid,
            quad_tol: DEFAULT_QUAD_TOL,
            tol_arg: DEFAULT_TOL_ARG,
            grid_safety: DEFAULT_GRID_SAFETY,
            norm: MatrixNorm::Spectral,
            sup_samples: 20_000,
            lp: None,
        }
    }
}

/// A certificate missing from a [`CertificateReport`].
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CertificateNote {
    pub certificate: String,
    pub reason: String,
    /// The certificate does not exist for this system (a kernel that is not
    /// integrable, an expanding iteration), as opposed to a numerical failure.
    pub inapplicable: bool,
}

impl fmt::Display for CertificateNote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.certificate, self.reason)
    }
}

/// Full certificate chain for a system.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CertificateReport {
    pub sector: SectorVerdict,
    pub c_alpha_a: Option<CValue>,
    pub q: Option<QCertificate>,
    pub small_gain: Option<SmallGain>,
    pub pe: Option<PeEstimate>,
    /// Empirical Lyapunov–Perron contraction ratio.
    pub mu: Option<f64>,
    /// `q + C(α, A)·L(r)` for a declared Lipschitz pair.
    pub mu_bound: Option<f64>,
    /// Certificates that could not be computed, with the reason.
    pub notes: Vec<CertificateNote>,
}

impl CertificateReport {
    /// True when the sector test passes and `q < 1` or small gain holds.
    pub fn certified(&self) -> bool {
        self.sector.is_stable()
            && (self.q.as_ref().is_some_and(|q| q.satisfied)
                || self.small_gain.as_ref().is_some_and(|s| s.satisfied))
    }
}

/// Computes every certificate that applies to `spec`. Failures of individual
/// certificates are recorded in `notes` rather than aborting the chain.
pub fn certify(spec: &SystemSpec, opts: &CertifyOptions) -> Result<CertificateReport> {
    spec.validate()?;
    let orders = spec.orders.as_slice();
    let sector = sector_classify(spec.orders.alpha_max(), &spec.a, opts.tol_arg)?;
    let mut report = CertificateReport {
        sector,
        c_alpha_a: None,
        q: None,
        small_gain: None,
        pe: None,
        mu: None,
        mu_bound: None,
        notes: Vec::new(),
    };
    match c_of_alpha_a_with(orders, &spec.a, opts.horizon, opts.quad_tol, opts.norm) {
        Ok(c) => report.c_alpha_a = Some(c),
        Err(e) => report.notes.push(report_note("C(alpha, A)", e)),
    }
    let zero = Signal::zero(spec.dim(), spec.dim());
    let q = spec.q.as_ref().unwrap_or(&zero);
    let grid = uniform_grid(opts.horizon, opts.grid.max(1));
    if report.c_alpha_a.is_some() {
        match q_certificate_with(
            orders,
            &spec.a,
            q,
            &grid,
            opts.quad_tol,
            opts.norm,
            opts.grid_safety,
        ) {
            Ok(c) => report.q = Some(c),
            Err(e) => report.notes.push(report_note("q", e)),
        }
        let sup_q = match q.bound(opts.horizon) {
            Some(b) if opts.norm == MatrixNorm::Spectral => Ok(b),
            _ => q.sampled_sup(opts.horizon, opts.sup_samples, |m| opts.norm.apply(m)),
        };
        match sup_q {
            Ok(s) => {
                let c = report.c_alpha_a.clone().expect("checked above");
                let threshold = if c.value > 0.0 {
                    1.0 / c.value
                } else {
                    f64::INFINITY
                };
                report.small_gain = Some(SmallGain {
                    threshold,
                    sup_q: s,
                    t_from: 0.0,
                    satisfied: s < threshold,
                    c,
                });
            }
            Err(e) => report.notes.push(report_note("small gain", e)),
        }
        if let (Some(qc), Some(c), Some((_, l))) = (
            &report.q,
            &report.c_alpha_a,
            spec.f.as_ref().and_then(|f| f.lipschitz),
        ) {
            report.mu_bound = Some(qc.q + c.value * l);
        }
    }
    if let Some(lp) = &opts.lp {
        match lp_fixed_point(spec, lp) {
            Ok(r) => report.mu = Some(r.mu),
            Err(e) => report
                .notes
                .push(report_note("Lyapunov-Perron contraction", e)),
        }
    }
    Ok(report)
}

fn report_note(what: &str, e: Error) -> CertificateNote {
    CertificateNote {
        certificate: String::from(what),
        inapplicable: matches!(e, Error::Divergence(_) | Error::NoContraction { .. }),
        reason: format!("{e}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::Waveform;

    fn m1(a: f64) -> Mat {
        Mat::from_rows(&[[a]]).unwrap()
    }

    #[test]
    fn c_closed_forms() {
        let c = c_of_alpha_a(&[1.0], &m1(-2.0), 20.0, 1e-10).unwrap();
        assert!((c.value - 0.5).abs() < 1e-8, "{c:?}");
        for &al in &[0.3, 0.6, 0.9] {
            let c = c_of_alpha_a(&[al], &m1(-1.0), 50.0, 1e-9).unwrap();
            assert!((c.value - 1.0).abs() < 1e-5, "alpha {al}: {c:?}");
        }
        let c = c_of_alpha_a(&[0.7], &m1(-0.05), 50.0, 1e-9).unwrap();
        assert!((c.value - 20.0).abs() < 1e-3, "{c:?}");
    }

    #[test]
    fn c_rejects_unstable() {
        assert!(matches!(
            c_of_alpha_a(&[0.5], &m1(1.0), 10.0, 1e-8),
            Err(Error::Divergence(_))
        ));
        let rot = Mat::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]).unwrap();
        let r = c_of_alpha_a(&[0.9], &rot, 10.0, 1e-8);
        assert!(r.is_ok(), "{r:?}");
        assert!(c_of_alpha_a(&[1.0], &rot, 10.0, 1e-8).is_err());
    }

    #[test]
    fn q_constant_and_zero() {
        let grid = uniform_grid(60.0, 30);
        let z = q_certificate(&[0.8], &m1(-1.0), &Signal::zero(1, 1), &grid, 1e-9).unwrap();
        assert_eq!(z.q, 0.0);
        assert!(z.satisfied);
        let c = q_certificate(&[1.0], &m1(-2.0), &Signal::scalar(0.5), &grid, 1e-10).unwrap();
        assert!((c.q - 0.25).abs() < 1e-8);
        assert!((c.q_norm_integral - c.q).abs() < 1e-8);
    }

    #[test]
    fn q_homogeneity_and_refinement() {
        let w = Waveform::Sin {
            amp: 0.3,
            omega: 1.0,
            phase: 0.0,
        };
        let q = Signal::scaled(&Mat::identity(2), w.clone()).unwrap();
        let q3 = Signal::scaled(
            &Mat::identity(2),
            Waveform::Sin {
                amp: 0.9,
                omega: 1.0,
                phase: 0.0,
            },
        )
        .unwrap();
        let a = Mat::identity(2).scale(-1.0);
        let g = uniform_grid(30.0, 30);
        let r1 = q_certificate(&[0.7, 0.7], &a, &q, &g, 1e-9).unwrap();
        let r3 = q_certificate(&[0.7, 0.7], &a, &q3, &g, 1e-9).unwrap();
        assert!((r3.q - 3.0 * r1.q).abs() < 1e-7);
        let fine = q_certificate(&[0.7, 0.7], &a, &q, &uniform_grid(30.0, 60), 1e-9).unwrap();
        assert!(fine.q >= r1.q - 1e-12);
        assert!(r1.q_norm_integral >= r1.q);
    }

    #[test]
    fn q_decaying_perturbation() {
        let q = Signal::waveforms(
            1,
            1,
            vec![Waveform::Exp {
                amp: 1.0,
                rate: -1.0,
            }],
        )
        .unwrap();
        let r = q_certificate(&[0.7], &m1(-1.0), &q, &uniform_grid(40.0, 80), 1e-9).unwrap();
        assert!(r.satisfied);
        let (late, _, _) = convolution_norms(
            &Kernel::new(&[0.7], &m1(-1.0), 1e-9).unwrap(),
            &q,
            400.0,
            &[],
            1e-9,
            MatrixNorm::Spectral,
        )
        .unwrap();
        assert!(late < 0.01 && late < r.q);
    }

    #[test]
    fn small_gain_examples() {
        let s = small_gain(&[1.0], &m1(-2.0), 1.9, 0.0, 30.0, 1e-10).unwrap();
        assert!((s.threshold - 2.0).abs() < 1e-7 && s.satisfied);
        let s = small_gain(&[0.5], &m1(-1.0), 1.01, 0.0, 50.0, 1e-9).unwrap();
        assert!(!s.satisfied && (s.threshold - 1.0).abs() < 1e-4);
        assert!(
            small_gain(&[0.5], &m1(-1.0), 0.0, 0.0, 10.0, 1e-8)
                .unwrap()
                .satisfied
        );
    }

    #[test]
    fn small_gain_implies_q() {
        let q = Signal::scaled(
            &Mat::identity(1),
            Waveform::Cos {
                amp: 0.8,
                omega: 0.5,
                phase: 0.0,
            },
        )
        .unwrap();
        let sg = small_gain(&[0.6], &m1(-1.0), 0.8, 0.0, 50.0, 1e-9).unwrap();
        let qc = q_certificate(&[0.6], &m1(-1.0), &q, &uniform_grid(50.0, 50), 1e-9).unwrap();
        assert!(sg.satisfied);
        assert!(qc.q < 1.0 + 1e-4);
    }

    #[test]
    fn mixed_order_kernel_is_diagonal() {
        let a = Mat::from_rows(&[[-1.0, 0.1], [0.0, -2.0]]).unwrap();
        let c = c_of_alpha_a(&[0.6, 1.2], &a, 50.0, 1e-8).unwrap();
        assert!(c.value > 0.9 && c.value < 1.6, "{c:?}");
    }

    #[test]
    fn certify_chain() {
        let q = Signal::scaled(
            &Mat::identity(2),
            Waveform::Sin {
                amp: 0.3,
                omega: 1.0,
                phase: 0.0,
            },
        )
        .unwrap();
        let spec = SystemSpec::linear(
            crate::solver::OrderSpec::uniform(0.7, 2).unwrap(),
            Mat::identity(2).scale(-1.0),
            vec![1.0, 1.0],
        )
        .with_q(q);
        let r = certify(&spec, &CertifyOptions::new(20.0, 20)).unwrap();
        assert!(r.certified());
        assert!(r.q.as_ref().unwrap().recompute_satisfied());
        assert!(r.small_gain.as_ref().unwrap().recompute_satisfied());
        let bad = SystemSpec::linear(
            crate::solver::OrderSpec::uniform(0.7, 1).unwrap(),
            m1(1.0),
            vec![1.0],
        );
        let r = certify(&bad, &CertifyOptions::new(20.0, 20)).unwrap();
        assert!(!r.certified());
        assert!(!r.notes.is_empty());
    }
}
