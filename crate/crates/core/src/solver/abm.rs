//! Fractional Adams–Bashforth–Moulton predictor–corrector.
//!
//! Product-rectangle predictor and product-trapezoid corrector on the
//! Volterra form `xᵢ(t) = Tᵢ(t) + I^{αᵢ} gᵢ(t)` with full memory. Components
//! with `αᵢ = 1` use the local trapezoid (Heun) step.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{SolverMeta, SystemSpec, Trajectory};
use crate::error::{bail, Result};
use crate::special::recip_gamma;

pub const DEFAULT_CORRECTOR_ITERS: usize = 2;
pub const DEFAULT_CEILING: f64 = 1e9;
/// Switch times within this fraction of a step from a grid point are snapped.
const SNAP_REL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    pub t_end: f64,
    pub step: f64,
    /// Corrector applications per step, at least 1.
    pub corrector_iters: usize,
    /// Integration stops once `‖x‖∞` exceeds this value.
    pub ceiling: f64,
    /// Optional short-memory window length.
    pub memory_window: Option<f64>,
}

impl SolverOptions {
    pub fn new(t_end: f64, step: f64) -> Self {
        Self {
            t_end,
            step,
            corrector_iters: DEFAULT_CORRECTOR_ITERS,
            ceiling: DEFAULT_CEILING,
            memory_window: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            bail!(
                Validation,
                "horizon must be positive and finite, got {}",
                self.t_end
            );
        }
        if !(self.step > 0.0 && self.step <= self.t_end) {
            bail!(
                Validation,
                "step must lie in (0, horizon], got {}",
                self.step
            );
        }
        if self.t_end / self.step > 5e7 {
            bail!(
                Validation,
                "horizon/step = {:.3e} exceeds the supported grid size",
                self.t_end / self.step
            );
        }
        if self.corrector_iters == 0 {
            bail!(Validation, "corrector_iters must be at least 1");
        }
        if !(self.ceiling > 0.0) {
            bail!(Validation, "divergence ceiling must be positive");
        }
        if let Some(w) = self.memory_window {
            if !(w > 0.0) {
                bail!(Validation, "memory window must be positive, got {w}");
            }
        }
        Ok(())
    }
}

pub fn solve_ivp(spec: &SystemSpec, t_end: f64, step: f64) -> Result<Trajectory> {
    solve_ivp_with(spec, &SolverOptions::new(t_end, step))
}

/// Solves `spec` on `[0, t_end]`.
///
/// Switch times of `Q` and `ν` are snapped to the uniform grid when they lie
/// within `1e-9·step` of a grid point and inserted as extra nodes otherwise.
/// A non-uniform grid falls back to per-interval weights, which costs
/// `O(N²)` weight evaluations.
pub fn solve_ivp_with(spec: &SystemSpec, opts: &SolverOptions) -> Result<Trajectory> {
    spec.validate()?;
    opts.validate()?;
    let switches = spec.switch_times(opts.t_end);
    let (grid, uniform) = build_grid(opts.t_end, opts.step, &switches);
    let mut run = Run::new(spec, opts, grid, uniform);
    run.march()?;
    let method = if uniform {
        "fractional ABM, product trapezoid, uniform grid"
    } else {
        "fractional ABM, product trapezoid, non-uniform grid"
    };
    Ok(Trajectory {
        times: run.times,
        values: run.values,
        meta: SolverMeta {
            method: String::from(method),
            step: opts.step,
            corrector_iters: opts.corrector_iters,
            uniform_grid: uniform,
            switch_times: switches,
            memory_window: opts.memory_window,
            ceiling: opts.ceiling,
            diverged_at: run.diverged_at,
        },
        exact_reference: None,
    })
}

fn build_grid(t_end: f64, h: f64, switches: &[f64]) -> (Vec<f64>, bool) {
    let snap = SNAP_REL * h;
    let nr = (t_end / h).round();
    let aligned_end = (nr * h - t_end).abs() <= snap;
    let n = if aligned_end {
        nr as usize
    } else {
        (t_end / h).floor() as usize
    };
    let off_grid: Vec<f64> = switches
        .iter()
        .copied()
        .filter(|&s| s > 0.0 && s < t_end && ((s / h).round() * h - s).abs() > snap)
        .collect();
    if aligned_end && off_grid.is_empty() {
        return ((0..=n).map(|k| k as f64 * h).collect(), true);
    }
    let mut pts: Vec<f64> = (0..=n)
        .map(|k| k as f64 * h)
        .filter(|&t| t < t_end - snap)
        .collect();
    pts.extend(off_grid);
    pts.push(t_end);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let mut grid: Vec<f64> = Vec::with_capacity(pts.len());
    for t in pts {
        match grid.last_mut() {
            Some(last) if t - *last <= snap => *last = t.max(*last),
            _ => grid.push(t),
        }
    }
    grid[0] = 0.0;
    (grid, false)
}

/// Moments of `(T−s)^{α−1}` over an interval `[t_j, t_j + Δ]` with
/// `T − t_j − Δ = w ≥ 0`: returns `(∫ (T−s)^{α−1} ds, ∫ (T−s)^{α−1}(s−t_j) ds)`.
pub(crate) fn interval_moments(alpha: f64, w: f64, delta: f64) -> (f64, f64) {
    let p = alpha + 1.0;
    if w <= 0.0 {
        return (delta.powf(alpha) / alpha, delta.powf(p) / (alpha * p));
    }
    let y = delta / w;
    let i0 = w.powf(alpha) * (alpha * y.ln_1p()).exp_m1() / alpha;
    // S = (1+y)^p − 1 − p·y
    let s = if y < 0.1 {
        let mut c = p * (p - 1.0) / 2.0;
        let mut yk = y * y;
        let mut acc = 0.0;
        for k in 2..40 {
            let term = c * yk;
            acc += term;
            if term.abs() <= 1e-18 * acc.abs() {
                break;
            }
            c *= (p - k as f64) / (k as f64 + 1.0);
            yk *= y;
        }
        acc
    } else {
        (1.0 + y).powf(p) - 1.0 - p * y
    };
    (i0, w.powf(p) * s / (alpha * p))
}

/// Toeplitz weights for one order on a uniform grid, scaled by `1/Γ(α)`.
struct UniformWeights {
    /// Predictor weight on `g_j`, indexed by `n − j`.
    pred: Vec<f64>,
    /// Corrector weight on an interior node, indexed by `n − j`.
    interior: Vec<f64>,
    /// Corrector weight on the first retained node, indexed by `n − j`.
    first: Vec<f64>,
    /// Corrector weight on the new node.
    new: f64,
}

impl UniformWeights {
    fn new(alpha: f64, h: f64, len: usize) -> Self {
        let rg = recip_gamma(alpha);
        let m: Vec<(f64, f64)> = (0..=len + 1)
            .map(|k| interval_moments(alpha, k as f64 * h, h))
            .collect();
        let pred = m.iter().take(len + 1).map(|&(i0, _)| i0 * rg).collect();
        let first: Vec<f64> = m
            .iter()
            .take(len + 1)
            .map(|&(i0, i1)| (i0 - i1 / h) * rg)
            .collect();
        let interior = (0..=len).map(|k| first[k] + m[k + 1].1 / h * rg).collect();
        Self {
            pred,
            interior,
            first,
            new: m[0].1 / h * rg,
        }
    }
}

struct Run<'a> {
    spec: &'a SystemSpec,
    opts: &'a SolverOptions,
    grid: Vec<f64>,
    uniform: bool,
    alphas: Vec<f64>,
    /// History `g_j` per component.
    g: Vec<Vec<f64>>,
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
    diverged_at: Option<f64>,
}

impl<'a> Run<'a> {
    fn new(spec: &'a SystemSpec, opts: &'a SolverOptions, grid: Vec<f64>, uniform: bool) -> Self {
        let n = spec.dim();
        let cap = grid.len();
        Self {
            spec,
            opts,
            alphas: spec.orders.as_slice().to_vec(),
            g: (0..n).map(|_| Vec::with_capacity(cap)).collect(),
            times: Vec::with_capacity(cap),
            values: Vec::with_capacity(cap),
            grid,
            uniform,
            diverged_at: None,
        }
    }

    fn initial_poly(&self, i: usize, t: f64) -> f64 {
        let mut v = self.spec.x0[i];
        if self.alphas[i] > 1.0 {
            if let Some(xd) = &self.spec.xdot0 {
                v += t * xd[i];
            }
        }
        v
    }

    fn rhs(&self, t: f64, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.spec.rhs(t, x, out)?;
        if out.iter().any(|v| v.is_nan()) {
            bail!(Numeric, "right-hand side is NaN at t = {t}");
        }
        Ok(())
    }

    fn push(&mut self, t: f64, x: Vec<f64>, gx: &[f64]) {
        for (gi, &v) in self.g.iter_mut().zip(gx) {
            gi.push(v);
        }
        self.times.push(t);
        self.values.push(x);
    }

    fn march(&mut self) -> Result<()> {
        let n = self.spec.dim();
        let x0 = self.spec.x0.clone();
        let mut gx = vec![0.0; n];
        self.rhs(0.0, &x0, &mut gx)?;
        self.push(0.0, x0, &gx);

        let steps = self.grid.len() - 1;
        let mut weights: Vec<(f64, UniformWeights)> = Vec::new();
        if self.uniform {
            for &a in &self.alphas {
                if a != 1.0 && !weights.iter().any(|(b, _)| *b == a) {
                    weights.push((a, UniformWeights::new(a, self.opts.step, steps)));
                }
            }
        }
        let window = self.opts.memory_window;
        let mut pred = vec![0.0; n];
        let mut hist = vec![0.0; n];
        let mut cnew = vec![0.0; n];
        let mut xp = vec![0.0; n];
        let mut gp = vec![0.0; n];

        for k in 0..steps {
            let t1 = self.grid[k + 1];
            let h = t1 - self.grid[k];
            let j0 = match window {
                Some(wl) => self.grid[..=k].partition_point(|&t| t1 - t > wl).min(k),
                None => 0,
            };
            for i in 0..n {
                let a = self.alphas[i];
                let gi = &self.g[i];
                if a == 1.0 {
                    let xk = self.values[k][i];
                    pred[i] = xk + h * gi[k];
                    hist[i] = xk + 0.5 * h * gi[k];
                    cnew[i] = 0.5 * h;
                    continue;
                }
                let base = self.initial_poly(i, t1);
                let (mut sp, mut sc) = (0.0, 0.0);
                if self.uniform {
                    let w = &weights
                        .iter()
                        .find(|(b, _)| *b == a)
                        .expect("weights built per order")
                        .1;
                    sc += w.first[k - j0] * gi[j0];
                    for j in j0..=k {
                        sp += w.pred[k - j] * gi[j];
                    }
                    for j in j0 + 1..=k {
                        sc += w.interior[k - j] * gi[j];
                    }
                    cnew[i] = w.new;
                } else {
                    let rg = recip_gamma(a);
                    for j in j0..=k {
                        let d = self.grid[j + 1] - self.grid[j];
                        let (i0, i1) = interval_moments(a, t1 - self.grid[j + 1], d);
                        sp += i0 * gi[j];
                        sc += (i0 - i1 / d) * gi[j];
                        if j < k {
                            sc += i1 / d * gi[j + 1];
                        } else {
                            cnew[i] = i1 / d * rg;
                        }
                    }
                    sp *= rg;
                    sc *= rg;
                }
                pred[i] = base + sp;
                hist[i] = base + sc;
            }
            xp.copy_from_slice(&pred);
            for _ in 0..self.opts.corrector_iters {
                self.rhs(t1, &xp, &mut gp)?;
                for i in 0..n {
                    xp[i] = hist[i] + cnew[i] * gp[i];
                }
            }
            if xp.iter().any(|v| v.is_nan()) {
                bail!(Numeric, "state became NaN at t = {t1}");
            }
            let sup = xp.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if !(sup <= self.opts.ceiling) {
                self.diverged_at = Some(t1);
                if sup.is_finite() {
                    gx.iter_mut().for_each(|v| *v = 0.0);
                    self.push(t1, xp.clone(), &gx);
                }
                return Ok(());
            }
            self.rhs(t1, &xp, &mut gx)?;
            self.push(t1, xp.clone(), &gx);
        }
        Ok(())
    }
}
