//! Adaptive Gauss–Kronrod (7/15) quadrature for vector-valued integrands,
//! plus the two substitutions used for Mittag-Leffler kernels: a power map
//! that removes a `τ^{α-1}` singularity at the origin and an inverse-power
//! map that turns a `τ^{-α-1}` tail into a finite interval.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and limits for [`integrate`].
#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_intervals: 2000,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: tol,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuadResult {
    pub value: Vec<f64>,
    /// Estimated absolute error (max over components).
    pub error: f64,
    pub intervals: usize,
}

struct Piece {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

fn kronrod<F>(f: &mut F, a: f64, b: f64, dim: usize) -> Result<Piece>
where
    F: FnMut(f64, &mut [f64]) -> Result<()>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = vec![0.0; dim];
    let mut g = vec![0.0; dim];
    let mut buf = vec![0.0; dim];
    let mut buf2 = vec![0.0; dim];
    f(c, &mut buf)?;
    for i in 0..dim {
        k[i] = WGK[7] * buf[i];
        g[i] = WG[3] * buf[i];
    }
    for j in 0..7 {
        let dx = h * XGK[j];
        f(c - dx, &mut buf)?;
        f(c + dx, &mut buf2)?;
        for i in 0..dim {
            let s = buf[i] + buf2[i];
            k[i] += WGK[j] * s;
            if j % 2 == 1 {
                g[i] += WG[j / 2] * s;
            }
        }
    }
    let mut err = 0.0f64;
    for i in 0..dim {
        k[i] *= h;
        g[i] *= h;
        let e = (k[i] - g[i]).abs();
        // QUADPACK-style error sharpening: (200 e)^{1.5}, capped at e.
        let e = if e > 0.0 {
            e.min((200.0 * e).powf(1.5))
        } else {
            0.0
        };
        err = err.max(e);
        if !k[i].is_finite() {
            return Err(Error::Numeric(alloc::format!(
                "non-finite integrand value on [{a}, {b}]"
            )));
        }
    }
    let floor = 50.0 * f64::EPSILON * k.iter().map(|x| x.abs()).fold(0.0, f64::max);
    Ok(Piece {
        a,
        b,
        value: k,
        error: err.max(floor),
    })
}

/// Adaptively integrates a `dim`-vector valued `f` over `[a, b]`.
///
/// The integrand writes its value into the provided slice. Convergence is
/// declared when the summed error estimate is below
/// `max(abs_tol, rel_tol · ‖I‖∞)`; otherwise an accuracy error is returned
/// with the estimate reached.
pub fn integrate<F>(mut f: F, a: f64, b: f64, dim: usize, opts: QuadOptions) -> Result<QuadResult>
where
    F: FnMut(f64, &mut [f64]) -> Result<()>,
{
    if a == b {
        return Ok(QuadResult {
            value: vec![0.0; dim],
            error: 0.0,
            intervals: 0,
        });
    }
    let first = kronrod(&mut f, a, b, dim)?;
    let mut total = first.value.clone();
    let mut err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    loop {
        let scale = total.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let target = opts.abs_tol.max(opts.rel_tol * scale);
        if err <= target {
            break;
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::Accuracy {
                message: alloc::format!(
                    "quadrature on [{a}, {b}] did not reach tolerance {target:e} within {} intervals",
                    opts.max_intervals
                ),
                bound: err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // Interval cannot be split further in floating point.
            heap.push(Piece {
                error: 0.0,
                ..worst
            });
            err = heap.iter().map(|p| p.error).sum();
            if err <= target {
                break;
            }
            continue;
        }
        let left = kronrod(&mut f, worst.a, mid, dim)?;
        let right = kronrod(&mut f, mid, worst.b, dim)?;
        for i in 0..dim {
            total[i] += left.value[i] + right.value[i] - worst.value[i];
        }
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Recompute from scratch now and then to limit drift.
        if heap.len() % 64 == 0 {
            err = heap.iter().map(|p| p.error).sum();
            total = vec![0.0; dim];
            for p in heap.iter() {
                for i in 0..dim {
                    total[i] += p.value[i];
                }
            }
        }
    }
    let intervals = heap.len();
    let mut value = vec![0.0; dim];
    let mut err_sum = 0.0;
    for p in heap.iter() {
        err_sum += p.error;
        for i in 0..dim {
            value[i] += p.value[i];
        }
    }
    Ok(QuadResult {
        value,
        error: err_sum,
        intervals,
    })
}

/// Scalar convenience wrapper around [`integrate`].
pub fn integrate_scalar<F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let r = integrate(
        |x, out| {
            out[0] = f(x)?;
            Ok(())
        },
        a,
        b,
        1,
        opts,
    )?;
    Ok((r.value[0], r.error))
}

/// `∫₀^b f(τ) dτ` for integrands behaving like `τ^{p-1}` at the origin
/// (`p > 0`), via `τ = u^{1/p}`.
pub fn integrate_from_origin<F>(
    mut f: F,
    b: f64,
    p: f64,
    dim: usize,
    opts: QuadOptions,
) -> Result<QuadResult>
where
    F: FnMut(f64, &mut [f64]) -> Result<()>,
{
    if p == 1.0 {
        return integrate(f, 0.0, b, dim, opts);
    }
    let inv = 1.0 / p;
    integrate(
        |u, out| {
            if u <= 0.0 {
                out.iter_mut().for_each(|x| *x = 0.0);
                return integrand_at_origin(&mut f, p, out);
            }
            let tau = u.powf(inv);
            f(tau, out)?;
            let jac = inv * tau / u;
            out.iter_mut().for_each(|x| *x *= jac);
            Ok(())
        },
        0.0,
        b.powf(p),
        dim,
        opts,
    )
}

fn integrand_at_origin<F>(f: &mut F, p: f64, out: &mut [f64]) -> Result<()>
where
    F: FnMut(f64, &mut [f64]) -> Result<()>,
{
    // Gauss–Kronrod never samples the endpoint; kept for completeness.
    let u = 1e-300f64;
    let tau = u.powf(1.0 / p);
    f(tau, out)?;
    let jac = tau / (p * u);
    out.iter_mut().for_each(|x| *x *= jac);
    Ok(())
}

/// `∫_h^∞ f(τ) dτ` for integrands decaying like `τ^{-p-1}` (`p > 0`), via
/// `τ = h·s^{-1/p}`, `s ∈ (0, 1]`.
pub fn integrate_tail<F>(
    mut f: F,
    h: f64,
    p: f64,
    dim: usize,
    opts: QuadOptions,
) -> Result<QuadResult>
where
    F: FnMut(f64, &mut [f64]) -> Result<()>,
{
    let inv = 1.0 / p;
    integrate(
        |s, out| {
            let tau = h * s.powf(-inv);
            if !tau.is_finite() {
                out.iter_mut().for_each(|x| *x = 0.0);
                return Ok(());
            }
            f(tau, out)?;
            let jac = inv * tau / s;
            out.iter_mut().for_each(|x| *x *= jac);
            Ok(())
        },
        0.0,
        1.0,
        dim,
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use libm::{exp, pow, sqrt};

    #[test]
    fn polynomial_is_exact() {
        let (v, _) = integrate_scalar(
            |x| Ok(x * x * x - 2.0 * x),
            0.0,
            2.0,
            QuadOptions::default(),
        )
        .unwrap();
        assert!((v - 0.0).abs() < 1e-14);
    }

    #[test]
    fn vector_integrand() {
        let r = integrate(
            |x, out| {
                out[0] = exp(x);
                out[1] = 1.0 / (1.0 + x * x);
                Ok(())
            },
            0.0,
            1.0,
            2,
            QuadOptions::with_tol(1e-13),
        )
        .unwrap();
        assert!((r.value[0] - (core::f64::consts::E - 1.0)).abs() < 1e-13);
        assert!((r.value[1] - core::f64::consts::FRAC_PI_4).abs() < 1e-13);
    }

    #[test]
    fn origin_singularity_is_removed() {
        // ∫₀¹ τ^{-0.7} dτ = 1/0.3
        let r = integrate_from_origin(
            |t, out| {
                out[0] = pow(t, -0.7);
                Ok(())
            },
            1.0,
            0.3,
            1,
            QuadOptions::with_tol(1e-12),
        )
        .unwrap();
        assert!((r.value[0] - 1.0 / 0.3).abs() < 1e-10, "{}", r.value[0]);
    }

    #[test]
    fn algebraic_tail() {
        // ∫_4^∞ τ^{-1.5} dτ = 2/√4 = 1
        let r = integrate_tail(
            |t, out| {
                out[0] = 1.0 / (t * sqrt(t));
                Ok(())
            },
            4.0,
            0.5,
            1,
            QuadOptions::with_tol(1e-12),
        )
        .unwrap();
        assert!((r.value[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn failure_reports_bound() {
        let e = integrate_scalar(
            |x| Ok(if x < 0.5 { 0.0 } else { 1.0 } + (1.0 / x).sin()),
            1e-9,
            1.0,
            QuadOptions {
                abs_tol: 1e-15,
                rel_tol: 0.0,
                max_intervals: 8,
            },
        )
        .unwrap_err();
        assert!(matches!(e, Error::Accuracy { .. }));
    }
}
