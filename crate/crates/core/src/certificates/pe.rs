//! Persistent excitation and pulse constructions.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::quad_opts;
use crate::error::{bail, Result};
use crate::linalg::{sym_eigenvalues, Mat};
use crate::ml::{kernel_integral_scalar, kernel_scalar};
use crate::quad::{integrate, integrate_from_origin, integrate_tail};
use crate::signal::{Signal, Waveform};

/// Cells per window in the sliding Gramian.
const CELLS_PER_WINDOW: usize = 64;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PeCandidate {
    pub t0: f64,
    /// Infimum over window starts of `λ_min((1/T₀)∫_t^{t+T₀} w wᵀ)`.
    pub min_eig: f64,
    /// Window start attaining `min_eig`.
    pub worst_start: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PeEstimate {
    pub pe: bool,
    /// Best `ε` when `pe`; otherwise the largest windowed minimum found.
    pub epsilon: f64,
    pub t0: Option<f64>,
    /// `ε` must exceed this floor (`100 · quad_tol`) to count as excitation.
    pub floor: f64,
    pub horizon: f64,
    pub candidates: Vec<PeCandidate>,
}

/// Estimates PE parameters `(ε, T₀)` of `w` on window starts in
/// `[0, horizon]`. Each window is split into 64 cells whose Gramians are
/// integrated once and accumulated.
pub fn pe_estimate(
    w: &Signal,
    t0_candidates: &[f64],
    horizon: f64,
    quad_tol: f64,
) -> Result<PeEstimate> {
    if t0_candidates.is_empty() {
        bail!(Usage, "pe_estimate needs at least one window length T0");
    }
    if let Some(&t0) = t0_candidates.iter().find(|&&t| !(t > 0.0 && t.is_finite())) {
        bail!(
            Validation,
            "window length T0 must be positive and finite, got {t0}"
        );
    }
    if !(horizon >= 0.0 && horizon.is_finite()) {
        bail!(
            Validation,
            "horizon must be finite and non-negative, got {horizon}"
        );
    }
    let (rows, cols) = w.shape();
    if cols != 1 {
        bail!(
            Validation,
            "w must be a vector signal, got shape ({rows}, {cols})"
        );
    }
    let d = rows;
    let floor = 100.0 * quad_tol;
    let mut candidates = Vec::with_capacity(t0_candidates.len());
    for &t0 in t0_candidates {
        let cell = t0 / CELLS_PER_WINDOW as f64;
        let starts = (horizon / cell).floor() as usize;
        let ncell = starts + CELLS_PER_WINDOW;
        let switches = w.switch_times(ncell as f64 * cell);
        let mut cum: Vec<Vec<f64>> = Vec::with_capacity(ncell + 1);
        cum.push(vec![0.0; d * d]);
        for c in 0..ncell {
            let (a, b) = (c as f64 * cell, (c + 1) as f64 * cell);
            let g = cell_gramian(w, a, b, &switches, d, quad_tol)?;
            let prev = &cum[c];
            cum.push(prev.iter().zip(&g).map(|(p, q)| p + q).collect());
        }
        let (mut min_eig, mut worst) = (f64::INFINITY, 0.0);
        for i in 0..=starts {
            let g: Vec<f64> = cum[i + CELLS_PER_WINDOW]
                .iter()
                .zip(&cum[i])
                .map(|(hi, lo)| (hi - lo) / t0)
                .collect();
            let lam = sym_eigenvalues(&Mat::from_vec(d, d, g)?)[0];
            if lam < min_eig {
                min_eig = lam;
                worst = i as f64 * cell;
            }
        }
        candidates.push(PeCandidate {
            t0,
            min_eig,
            worst_start: worst,
        });
    }
    let best = candidates
        .iter()
        .filter(|c| c.min_eig > floor)
        .max_by(|a, b| {
            a.min_eig
                .partial_cmp(&b.min_eig)
                .unwrap_or(core::cmp::Ordering::Equal)
        });
    Ok(match best {
        Some(c) => PeEstimate {
            pe: true,
            epsilon: c.min_eig,
            t0: Some(c.t0),
            floor,
            horizon,
            candidates: candidates.clone(),
        },
        None => {
            let largest = candidates
                .iter()
                .map(|c| c.min_eig)
                .fold(f64::NEG_INFINITY, f64::max);
            PeEstimate {
                pe: false,
                epsilon: largest,
                t0: None,
                floor,
                horizon,
                candidates,
            }
        }
    })
}

fn cell_gramian(
    w: &Signal,
    a: f64,
    b: f64,
    switches: &[f64],
    d: usize,
    tol: f64,
) -> Result<Vec<f64>> {
    let mut acc = vec![0.0; d * d];
    let mut lo = a;
    let inner = switches.iter().copied().filter(|&s| s > a && s < b);
    for hi in inner.chain(core::iter::once(b)) {
        let r = integrate(
            |t, out| {
                let v = w.eval_vec(t)?;
                for i in 0..d {
                    for j in 0..d {
                        out[i * d + j] = v[i] * v[j];
                    }
                }
                Ok(())
            },
            lo,
            hi,
            d * d,
            quad_opts(tol),
        )?;
        for (x, v) in acc.iter_mut().zip(r.value) {
            *x += v;
        }
        lo = hi;
    }
    Ok(acc)
}

/// Non-negative periodic pulse: `amp` on `[kP, kP + duty·P)`, zero elsewhere.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Pulse {
    pub amp: f64,
    pub duty: f64,
    pub period: f64,
}

impl Pulse {
    pub fn validate(&self) -> Result<()> {
        if !(self.amp >= 0.0 && self.amp.is_finite()) {
            bail!(
                Validation,
                "pulse amplitude must be finite and non-negative, got {}",
                self.amp
            );
        }
        if !(self.duty > 0.0 && self.duty <= 1.0) {
            bail!(
                Validation,
                "pulse duty fraction must lie in (0, 1], got {}",
                self.duty
            );
        }
        if !(self.period > 0.0 && self.period.is_finite()) {
            bail!(
                Validation,
                "pulse period must be positive, got {}",
                self.period
            );
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        let r = t - self.period * (t / self.period).floor();
        if r < self.duty * self.period {
            self.amp
        } else {
            0.0
        }
    }

    pub fn to_signal(&self) -> Signal {
        let w = Waveform::Square {
            high: self.amp,
            low: 0.0,
            period: self.period,
            duty: self.duty,
            phase: 0.0,
        };
        Signal::waveforms(1, 1, vec![w]).expect("1x1 waveform")
    }

    /// On-intervals starting before `until`.
    fn on_intervals(&self, until: f64) -> Vec<(f64, f64)> {
        let n = (until / self.period).ceil() as usize;
        (0..n)
            .map(|k| (k as f64 * self.period, (k as f64 + self.duty) * self.period))
            .collect()
    }
}

/// Upper bound on `sup_{t ≥ 0} ∫₀ᵗ |k(τ)| p(t−τ) dτ` with
/// `k(τ) = τ^{α−1} E_{α,α}(−ε τ^α)`: the maximum over a grid on
/// `[0, horizon]` plus `amp · ∫_horizon^∞ |k|`.
pub fn pulse_margin(alpha: f64, epsilon: f64, pulse: &Pulse, horizon: f64) -> Result<f64> {
    pulse.validate()?;
    if !(epsilon > 0.0) {
        bail!(Validation, "epsilon must be positive, got {epsilon}");
    }
    if !(alpha > 0.0 && alpha < 2.0) {
        bail!(Domain, "order must lie in (0, 2), got {alpha}");
    }
    if pulse.amp == 0.0 {
        return Ok(0.0);
    }
    let tol = 1e-10;
    // Exact antiderivative for the completely monotone case α ≤ 1.
    let abs_int = |lo: f64, hi: f64| -> Result<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        if alpha <= 1.0 {
            return Ok(kernel_integral_scalar(alpha, -epsilon, hi)?
                - kernel_integral_scalar(alpha, -epsilon, lo)?);
        }
        let f = |t: f64, out: &mut [f64]| {
            out[0] = kernel_scalar(alpha, -epsilon, t)?.abs();
            Ok(())
        };
        let r = if lo == 0.0 {
            integrate_from_origin(f, hi, alpha, 1, quad_opts(tol))?
        } else {
            integrate(f, lo, hi, 1, quad_opts(tol))?
        };
        Ok(r.value[0])
    };
    let intervals = pulse.on_intervals(horizon);
    let mut times: Vec<f64> = (1..=((horizon / pulse.period * 32.0).ceil() as usize))
        .map(|k| (k as f64 * pulse.period / 32.0).min(horizon))
        .collect();
    times.extend(intervals.iter().map(|&(_, b)| b).filter(|&b| b <= horizon));
    let mut sup: f64 = 0.0;
    for &t in &times {
        let mut v = 0.0;
        for &(a, b) in intervals.iter().take_while(|iv| iv.0 < t) {
            v += abs_int(t - b.min(t), t - a)?;
        }
        sup = sup.max(pulse.amp * v);
    }
    let tail = if alpha <= 1.0 {
        (1.0 / epsilon - kernel_integral_scalar(alpha, -epsilon, horizon)?).max(0.0)
    } else {
        let f = |t: f64, out: &mut [f64]| {
            out[0] = kernel_scalar(alpha, -epsilon, t)?.abs();
            Ok(())
        };
        integrate_tail(f, horizon, alpha, 1, quad_opts(tol))?.value[0]
    };
    Ok(sup + pulse.amp * tail)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PulseSearch {
    pub found: bool,
    pub pulse: Option<Pulse>,
    pub margin: Option<f64>,
    pub target: f64,
    pub evaluations: usize,
}

const SEARCH_STEPS: usize = 30;
const MIN_DUTY: f64 = 1e-3;

/// Finds a pulse with `pulse_margin ≤ 1 − safety`: the largest duty fraction
/// at amplitude `max_amp`, or failing that the largest amplitude at duty 1/2.
pub fn pulse_search(
    alpha: f64,
    epsilon: f64,
    period: f64,
    max_amp: f64,
    safety: f64,
    horizon: f64,
) -> Result<PulseSearch> {
    if !(max_amp > 0.0) {
        bail!(Validation, "max_amp must be positive, got {max_amp}");
    }
    if !(0.0..1.0).contains(&safety) {
        bail!(Validation, "safety must lie in [0, 1), got {safety}");
    }
    let target = 1.0 - safety;
    let mut evaluations = 0;
    let mut margin = |amp: f64, duty: f64| {
        evaluations += 1;
        pulse_margin(alpha, epsilon, &Pulse { amp, duty, period }, horizon)
    };
    let full = margin(max_amp, 1.0)?;
    let mut best: Option<(Pulse, f64)> = None;
    if full <= target {
        best = Some((
            Pulse {
                amp: max_amp,
                duty: 1.0,
                period,
            },
            full,
        ));
    } else {
        let m0 = margin(max_amp, MIN_DUTY)?;
        if m0 <= target {
            let (mut lo, mut hi, mut m_lo) = (MIN_DUTY, 1.0, m0);
            for _ in 0..SEARCH_STEPS {
                let mid = 0.5 * (lo + hi);
                let m = margin(max_amp, mid)?;
                if m <= target {
                    lo = mid;
                    m_lo = m;
                } else {
                    hi = mid;
                }
            }
            best = Some((
                Pulse {
                    amp: max_amp,
                    duty: lo,
                    period,
                },
                m_lo,
            ));
        } else {
            let (mut lo, mut hi, mut m_lo) = (0.0, max_amp, 0.0);
            for _ in 0..SEARCH_STEPS {
                let mid = 0.5 * (lo + hi);
                let m = margin(mid, 0.5)?;
                if m <= target {
                    lo = mid;
                    m_lo = m;
                } else {
                    hi = mid;
                }
            }
            if lo > 0.0 {
                best = Some((
                    Pulse {
                        amp: lo,
                        duty: 0.5,
                        period,
                    },
                    m_lo,
                ));
            }
        }
    }
    Ok(match best {
        Some((p, m)) => PulseSearch {
            found: true,
            pulse: Some(p),
            margin: Some(m),
            target,
            evaluations,
        },
        None => PulseSearch {
            found: false,
            pulse: None,
            margin: None,
            target,
            evaluations,
        },
    })
}
