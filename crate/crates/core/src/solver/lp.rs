//! Lyapunov–Perron fixed point
//!
//! ```text
//! ξ(t) = Φ₀(t) + ∫₀ᵗ K(t−s) [P(s) ξ(s) + f(ξ(s)) + ν(s)] ds
//! ```
//!
//! solved by Picard iteration. `K(t) = t^{α−1} E_{α,α}(t^α A)` for
//! commensurate orders. For mixed orders `K` uses the diagonal of `A` with
//! per-component orders and the off-diagonal part moves into `P`. The
//! convolution is product integration of the piecewise-linear interpolant
//! of the bracket against exact kernel moments, so the `t^{α−1}` singularity
//! is integrated exactly.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::SystemSpec;
use crate::error::{bail, Result};
use crate::linalg::Mat;
use crate::ml::{kernel_integral_scalar, kernel_second_integral_scalar, ml_real, MatrixMl};

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LpOptions {
    pub horizon: f64,
    /// Number of grid intervals.
    pub intervals: usize,
    /// Stop when `sup‖ξ_{k+1} − ξ_k‖ ≤ tol · max(1, sup‖ξ_k‖)`.
    pub tol: f64,
    pub max_iter: usize,
}

impl LpOptions {
    pub fn new(horizon: f64, intervals: usize) -> Self {
        Self {
            horizon,
            intervals,
            tol: 1e-10,
            max_iter: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LpResult {
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub iterations: usize,
    /// Largest ratio of successive sup-norm iterate differences.
    pub mu: f64,
    /// Sup-norm differences of successive iterates.
    pub differences: Vec<f64>,
    pub converged: bool,
}

/// Consecutive non-contracting iterations tolerated before giving up.
const MAX_EXPANDING: usize = 5;

pub fn lp_fixed_point(spec: &SystemSpec, opts: &LpOptions) -> Result<LpResult> {
    spec.validate()?;
    if !(opts.horizon > 0.0 && opts.horizon.is_finite()) || opts.intervals == 0 {
        bail!(
            Validation,
            "LP grid needs a positive horizon and at least one interval"
        );
    }
    let d = spec.dim();
    let m = opts.intervals;
    let h = opts.horizon / m as f64;
    let times: Vec<f64> = (0..=m).map(|k| k as f64 * h).collect();
    let alphas = spec.orders.as_slice();

    // Kernel tables I1(kh), I2(kh), the free response and the coupling part.
    let (i1, i2, phi0, coupling) = if spec.orders.is_commensurate() {
        let alpha = alphas[0];
        let ml = MatrixMl::new(&spec.a)?;
        let mut i1 = Vec::with_capacity(m + 1);
        let mut i2 = Vec::with_capacity(m + 1);
        let mut phi0 = Vec::with_capacity(m + 1);
        for &t in &times {
            i1.push(ml.kernel_integral(alpha, t)?);
            i2.push(ml.kernel_second_integral(alpha, t)?);
            let mut x = ml.eval(alpha, 1.0, t)?.mul_vec(&spec.x0);
            if let Some(v) = &spec.xdot0 {
                for (xi, ei) in x.iter_mut().zip(ml.eval(alpha, 2.0, t)?.mul_vec(v)) {
                    *xi += t * ei;
                }
            }
            phi0.push(x);
        }
        (i1, i2, phi0, None)
    } else {
        let diag = spec.a.diag();
        let mut off = spec.a.clone();
        for i in 0..d {
            off[(i, i)] = 0.0;
        }
        let mut i1 = Vec::with_capacity(m + 1);
        let mut i2 = Vec::with_capacity(m + 1);
        let mut phi0 = Vec::with_capacity(m + 1);
        for &t in &times {
            let mut a1 = vec![0.0; d];
            let mut a2 = vec![0.0; d];
            let mut x = vec![0.0; d];
            for i in 0..d {
                let (al, ai) = (alphas[i], diag[i]);
                a1[i] = kernel_integral_scalar(al, ai, t)?;
                a2[i] = kernel_second_integral_scalar(al, ai, t)?;
                x[i] = ml_real(al, 1.0, ai * t.powf(al))? * spec.x0[i];
                if let Some(v) = &spec.xdot0 {
                    if v[i] != 0.0 {
                        x[i] += t * ml_real(al, 2.0, ai * t.powf(al))? * v[i];
                    }
                }
            }
            i1.push(Mat::from_diag(&a1));
            i2.push(Mat::from_diag(&a2));
            phi0.push(x);
        }
        (i1, i2, phi0, Some(off))
    };

    // Node weights: V_end(m) on the first node, V_int(m) on interior nodes,
    // V_new on the current node, with m = n − j.
    let mut wa = Vec::with_capacity(m);
    let mut wb = Vec::with_capacity(m);
    for k in 0..m {
        let b = (&(&i2[k + 1] - &i2[k]) - &i1[k].scale(h)).scale(1.0 / h);
        let a = &(&i1[k + 1] - &i1[k]) - &b;
        wa.push(a);
        wb.push(b);
    }
    let v_int: Vec<Mat> = (0..=m)
        .map(|k| {
            if k == 0 || k >= m {
                Mat::zeros(d, d)
            } else {
                &wa[k - 1] + &wb[k]
            }
        })
        .collect();

    let qs: Vec<Option<Mat>> = match &spec.q {
        Some(q) => times
            .iter()
            .map(|&t| q.eval(t).map(Some))
            .collect::<Result<_>>()?,
        None => vec![None; m + 1],
    };
    let nus: Vec<Option<Vec<f64>>> = match &spec.nu {
        Some(nu) => times
            .iter()
            .map(|&t| nu.eval_vec(t).map(Some))
            .collect::<Result<_>>()?,
        None => vec![None; m + 1],
    };
    let bracket = |n: usize, x: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; d];
        if let Some(q) = &qs[n] {
            q.mul_vec_into(x, &mut out);
        }
        if let Some(off) = &coupling {
            for (o, v) in out.iter_mut().zip(off.mul_vec(x)) {
                *o += v;
            }
        }
        if let Some(f) = &spec.f {
            for (o, v) in out.iter_mut().zip(f.eval(x)) {
                *o += v;
            }
        }
        if let Some(nu) = &nus[n] {
            for (o, v) in out.iter_mut().zip(nu) {
                *o += v;
            }
        }
        out
    };

    let mut xi = phi0.clone();
    let mut diffs = Vec::new();
    let mut mu: f64 = 0.0;
    let mut expanding = 0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let hs: Vec<Vec<f64>> = xi.iter().enumerate().map(|(n, x)| bracket(n, x)).collect();
        if hs.iter().flatten().any(|v| !v.is_finite()) {
            bail!(
                Numeric,
                "LP bracket became non-finite in iteration {iterations}"
            );
        }
        let mut next = phi0.clone();
        for n in 1..=m {
            let out = &mut next[n];
            let mut acc = wa[n - 1].mul_vec(&hs[0]);
            for (a, v) in acc.iter_mut().zip(wb[0].mul_vec(&hs[n])) {
                *a += v;
            }
            for j in 1..n {
                let w = &v_int[n - j];
                let hj = &hs[j];
                for r in 0..d {
                    let row = w.row(r);
                    let mut s = 0.0;
                    for c in 0..d {
                        s += row[c] * hj[c];
                    }
                    acc[r] += s;
                }
            }
            for (o, a) in out.iter_mut().zip(acc) {
                *o += a;
            }
        }
        let mut dk: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for (a, b) in next.iter().zip(&xi) {
            let diff = a
                .iter()
                .zip(b)
                .map(|(p, q)| (p - q) * (p - q))
                .sum::<f64>()
                .sqrt();
            dk = dk.max(diff);
            scale = scale.max(a.iter().map(|v| v * v).sum::<f64>().sqrt());
        }
        if !dk.is_finite() {
            bail!(
                Numeric,
                "LP iterate became non-finite in iteration {iterations}"
            );
        }
        if let Some(&prev) = diffs.last() {
            if prev > 1e-13 * scale {
                let r = dk / prev;
                mu = mu.max(r);
                expanding = if r >= 1.0 { expanding + 1 } else { 0 };
            }
        }
        diffs.push(dk);
        xi = next;
        if dk <= opts.tol * scale {
            converged = true;
            break;
        }
        if expanding >= MAX_EXPANDING {
            return Err(crate::Error::NoContraction { mu, iterations });
        }
    }
    if !converged && mu >= 1.0 {
        return Err(crate::Error::NoContraction { mu, iterations });
    }
    Ok(LpResult {
        times,
        values: xi,
        iterations,
        mu,
        differences: diffs,
        converged,
    })
}
