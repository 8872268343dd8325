//! Piecewise-continuous time signals `Q(t)`, `ν(t)`, `w(t)`.
//!
//! Every signal has a fixed value shape (`rows × cols`; vectors are columns,
//! scalars are `1 × 1`) and knows its own discontinuities so solvers can put
//! grid points on them.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{bail, Result};
use crate::linalg::Mat;

fn rem_euclid(a: f64, b: f64) -> f64 {
    let r = a % b;
    if r < 0.0 {
        r + b
    } else {
        r
    }
}

/// Scalar closed-form time function.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)
)]
pub enum Waveform {
    Const {
        value: f64,
    },
    /// `amp · sin(omega t + phase)`
    Sin {
        amp: f64,
        omega: f64,
        #[cfg_attr(feature = "serde", serde(default))]
        phase: f64,
    },
    /// `amp · cos(omega t + phase)`
    Cos {
        amp: f64,
        omega: f64,
        #[cfg_attr(feature = "serde", serde(default))]
        phase: f64,
    },
    /// `amp · exp(rate t)`
    Exp {
        amp: f64,
        rate: f64,
    },
    /// `high` on the first `duty · period` of each period (shifted by
    /// `phase`), `low` on the rest.
    Square {
        high: f64,
        low: f64,
        period: f64,
        duty: f64,
        #[cfg_attr(feature = "serde", serde(default))]
        phase: f64,
    },
    Sum {
        terms: Vec<Waveform>,
    },
    Product {
        factors: Vec<Waveform>,
    },
}

impl Waveform {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Waveform::Const { value } => *value,
            Waveform::Sin { amp, omega, phase } => amp * (omega * t + phase).sin(),
            Waveform::Cos { amp, omega, phase } => amp * (omega * t + phase).cos(),
            Waveform::Exp { amp, rate } => amp * (rate * t).exp(),
            Waveform::Square {
                high,
                low,
                period,
                duty,
                phase,
            } => {
                let u = rem_euclid(t + phase, *period);
                if u < duty * period {
                    *high
                } else {
                    *low
                }
            }
            Waveform::Sum { terms } => terms.iter().map(|w| w.eval(t)).sum(),
            Waveform::Product { factors } => factors.iter().map(|w| w.eval(t)).product(),
        }
    }

    /// Upper bound of `|w(t)|` on `[0, horizon]` (`horizon` may be infinite).
    pub fn bound(&self, horizon: f64) -> f64 {
        match self {
            Waveform::Const { value } => value.abs(),
            Waveform::Sin { amp, .. } | Waveform::Cos { amp, .. } => amp.abs(),
            Waveform::Exp { amp, rate } => {
                if *rate <= 0.0 {
                    amp.abs()
                } else if *amp == 0.0 {
                    0.0
                } else {
                    amp.abs() * (rate * horizon).exp()
                }
            }
            Waveform::Square { high, low, .. } => high.abs().max(low.abs()),
            Waveform::Sum { terms } => terms.iter().map(|w| w.bound(horizon)).sum(),
            Waveform::Product { factors } => factors.iter().map(|w| w.bound(horizon)).product(),
        }
    }

    /// Discontinuities in `(0, until)`, unsorted.
    fn push_switches(&self, until: f64, out: &mut Vec<f64>) {
        match self {
            Waveform::Square {
                period,
                duty,
                phase,
                high,
                low,
            } => {
                if high == low || *period <= 0.0 {
                    return;
                }
                for offset in [0.0, duty * period] {
                    // t + phase ≡ offset (mod period)
                    let mut t = rem_euclid(offset - phase, *period);
                    while t < until {
                        if t > 0.0 {
                            out.push(t);
                        }
                        t += period;
                    }
                }
            }
            Waveform::Sum { terms } => terms.iter().for_each(|w| w.push_switches(until, out)),
            Waveform::Product { factors } => {
                factors.iter().for_each(|w| w.push_switches(until, out))
            }
            _ => {}
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = |x: f64, name: &str| -> Result<()> {
            if !x.is_finite() {
                bail!(Validation, "waveform parameter `{name}` must be finite");
            }
            Ok(())
        };
        match self {
            Waveform::Const { value } => finite(*value, "value"),
            Waveform::Sin { amp, omega, phase } | Waveform::Cos { amp, omega, phase } => {
                finite(*amp, "amp")?;
                finite(*omega, "omega")?;
                finite(*phase, "phase")
            }
            Waveform::Exp { amp, rate } => {
                finite(*amp, "amp")?;
                finite(*rate, "rate")
            }
            Waveform::Square {
                high,
                low,
                period,
                duty,
                phase,
            } => {
                finite(*high, "high")?;
                finite(*low, "low")?;
                finite(*phase, "phase")?;
                if !(period.is_finite() && *period > 0.0) {
                    bail!(
                        Validation,
                        "square wave period must be positive, got {period}"
                    );
                }
                if !(*duty >= 0.0 && *duty <= 1.0) {
                    bail!(
                        Validation,
                        "square wave duty must lie in [0, 1], got {duty}"
                    );
                }
                Ok(())
            }
            Waveform::Sum { terms } => terms.iter().try_for_each(Waveform::validate),
            Waveform::Product { factors } => factors.iter().try_for_each(Waveform::validate),
        }
    }
}

/// A segment of a piecewise signal, active on `[start, end)`.
#[derive(Clone, Debug)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub signal: Signal,
}

pub type SignalFn = Arc<dyn Fn(f64) -> Mat + Send + Sync>;

#[derive(Clone)]
pub enum SignalKind {
    Constant(Mat),
    /// Linear interpolation between samples; `times` strictly increasing.
    Sampled {
        times: Vec<f64>,
        values: Vec<Mat>,
    },
    /// Entry-wise closed forms, row-major.
    Waveforms(Vec<Waveform>),
    Piecewise(Vec<Segment>),
    Func(SignalFn),
    /// Pointwise image of another signal.
    Mapped {
        inner: Arc<Signal>,
        f: MapFn,
    },
    /// Pointwise combination of two signals.
    Zipped {
        a: Arc<Signal>,
        b: Arc<Signal>,
        f: ZipFn,
    },
}

pub type MapFn = Arc<dyn Fn(&Mat) -> Mat + Send + Sync>;
pub type ZipFn = Arc<dyn Fn(&Mat, &Mat) -> Mat + Send + Sync>;

impl fmt::Debug for SignalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignalKind::Constant(m) => f.debug_tuple("Constant").field(m).finish(),
            SignalKind::Sampled { times, .. } => write!(f, "Sampled({} samples)", times.len()),
            SignalKind::Waveforms(w) => f.debug_tuple("Waveforms").field(w).finish(),
            SignalKind::Piecewise(s) => f.debug_tuple("Piecewise").field(s).finish(),
            SignalKind::Func(_) => write!(f, "Func(..)"),
            SignalKind::Mapped { inner, .. } => {
                f.debug_struct("Mapped").field("inner", inner).finish()
            }
            SignalKind::Zipped { a, b, .. } => f
                .debug_struct("Zipped")
                .field("a", a)
                .field("b", b)
                .finish(),
        }
    }
}

/// Time-dependent scalar, vector or matrix.
#[derive(Clone, Debug)]
pub struct Signal {
    rows: usize,
    cols: usize,
    kind: SignalKind,
    declared_bound: Option<f64>,
    /// Extra discontinuities supplied by the user (e.g. for `Func`).
    extra_switches: Vec<f64>,
}

impl Signal {
    pub fn constant(value: Mat) -> Self {
        let (rows, cols) = value.shape();
        Self {
            rows,
            cols,
            kind: SignalKind::Constant(value),
            declared_bound: None,
            extra_switches: Vec::new(),
        }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self::constant(Mat::zeros(rows, cols))
    }

    pub fn scalar(value: f64) -> Self {
        Self::constant(Mat::scalar(value))
    }

    pub fn vector(values: &[f64]) -> Self {
        Self::constant(Mat::column_vector(values))
    }

    /// Entry-wise waveforms (row-major).
    pub fn waveforms(rows: usize, cols: usize, entries: Vec<Waveform>) -> Result<Self> {
        if entries.len() != rows * cols {
            bail!(
                Validation,
                "signal has {} waveform entries, expected {}x{}",
                entries.len(),
                rows,
                cols
            );
        }
        entries.iter().try_for_each(Waveform::validate)?;
        Ok(Self {
            rows,
            cols,
            kind: SignalKind::Waveforms(entries),
            declared_bound: None,
            extra_switches: Vec::new(),
        })
    }

    /// `base · w(t)` for a fixed matrix `base` and scalar waveform `w`.
    pub fn scaled(base: &Mat, w: Waveform) -> Result<Self> {
        let entries = base
            .as_slice()
            .iter()
            .map(|&b| {
                if b == 0.0 {
                    Waveform::Const { value: 0.0 }
                } else {
                    Waveform::Product {
                        factors: alloc::vec![Waveform::Const { value: b }, w.clone()],
                    }
                }
            })
            .collect();
        Self::waveforms(base.rows(), base.cols(), entries)
    }

    pub fn sampled(times: Vec<f64>, values: Vec<Mat>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            bail!(
                Validation,
                "sampled signal needs matching non-empty times ({}) and values ({})",
                times.len(),
                values.len()
            );
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || !times.iter().all(|t| t.is_finite()) {
            bail!(
                Validation,
                "sample times must be finite and strictly increasing"
            );
        }
        let (rows, cols) = values[0].shape();
        if values
            .iter()
            .any(|v| v.shape() != (rows, cols) || !v.is_finite())
        {
            bail!(
                Validation,
                "sampled values must share one shape and be finite"
            );
        }
        Ok(Self {
            rows,
            cols,
            kind: SignalKind::Sampled { times, values },
            declared_bound: None,
            extra_switches: Vec::new(),
        })
    }

    /// Segments must be contiguous, start at 0 and share one value shape.
    pub fn piecewise(segments: Vec<Segment>) -> Result<Self> {
        let Some(first) = segments.first() else {
            bail!(Validation, "piecewise signal needs at least one segment");
        };
        if first.start != 0.0 {
            bail!(
                Validation,
                "first segment must start at 0, got {}",
                first.start
            );
        }
        let (rows, cols) = first.signal.shape();
        for (i, s) in segments.iter().enumerate() {
            if !(s.end > s.start) {
                bail!(
                    Validation,
                    "segment {i} is empty or reversed: [{}, {})",
                    s.start,
                    s.end
                );
            }
            if s.signal.shape() != (rows, cols) {
                bail!(
                    Validation,
                    "segment {i} has shape {:?}, expected {:?}",
                    s.signal.shape(),
                    (rows, cols)
                );
            }
            if i > 0 && segments[i - 1].end != s.start {
                bail!(
                    Validation,
                    "segments {} and {i} overlap or leave a gap at t = {}",
                    i - 1,
                    s.start
                );
            }
        }
        Ok(Self {
            rows,
            cols,
            kind: SignalKind::Piecewise(segments),
            declared_bound: None,
            extra_switches: Vec::new(),
        })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        f: impl Fn(f64) -> Mat + Send + Sync + 'static,
    ) -> Self {
        Self {
            rows,
            cols,
            kind: SignalKind::Func(Arc::new(f)),
            declared_bound: None,
            extra_switches: Vec::new(),
        }
    }

    pub fn with_bound(mut self, bound: f64) -> Self {
        self.declared_bound = Some(bound);
        self
    }

    pub fn with_switches(mut self, mut switches: Vec<f64>) -> Self {
        switches.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        self.extra_switches = switches;
        self
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn kind(&self) -> &SignalKind {
        &self.kind
    }

    pub fn declared_bound(&self) -> Option<f64> {
        self.declared_bound
    }

    /// Time extent on which the signal is defined (`∞` unless sampled or
    /// piecewise).
    pub fn horizon(&self) -> f64 {
        match &self.kind {
            SignalKind::Sampled { times, .. } => *times.last().unwrap_or(&0.0),
            SignalKind::Piecewise(s) => s.last().map_or(0.0, |s| s.end),
            SignalKind::Mapped { inner, .. } => inner.horizon(),
            SignalKind::Zipped { a, b, .. } => a.horizon().min(b.horizon()),
            _ => f64::INFINITY,
        }
    }

    /// True when the value does not depend on time.
    pub fn is_constant(&self) -> bool {
        match &self.kind {
            SignalKind::Constant(_) => true,
            SignalKind::Waveforms(w) => w.iter().all(|w| matches!(w, Waveform::Const { .. })),
            _ => false,
        }
    }

    pub fn eval(&self, t: f64) -> Result<Mat> {
        if !t.is_finite() || t < 0.0 {
            bail!(Domain, "signal evaluated at invalid time {t}");
        }
        let m = match &self.kind {
            SignalKind::Constant(m) => m.clone(),
            SignalKind::Waveforms(w) => {
                Mat::from_vec(self.rows, self.cols, w.iter().map(|w| w.eval(t)).collect())?
            }
            SignalKind::Sampled { times, values } => {
                let last = *times.last().unwrap_or(&0.0);
                if t < times[0] || t > last {
                    bail!(
                        Domain,
                        "sampled signal is defined on [{}, {last}], evaluated at {t}",
                        times[0]
                    );
                }
                let i = times.partition_point(|&s| s <= t);
                if i == times.len() {
                    values[i - 1].clone()
                } else if i == 0 {
                    values[0].clone()
                } else {
                    let (t0, t1) = (times[i - 1], times[i]);
                    let w = (t - t0) / (t1 - t0);
                    &values[i - 1].scale(1.0 - w) + &values[i].scale(w)
                }
            }
            SignalKind::Piecewise(segs) => {
                let last = segs.last().expect("validated non-empty");
                let seg = segs.iter().find(|s| t >= s.start && t < s.end);
                match seg {
                    Some(s) => s.signal.eval(t)?,
                    None if t == last.end => last.signal.eval(t)?,
                    None => bail!(
                        Domain,
                        "piecewise signal is defined on [0, {}), evaluated at {t}",
                        last.end
                    ),
                }
            }
            SignalKind::Func(f) => {
                let m = f(t);
                if m.shape() != (self.rows, self.cols) {
                    bail!(
                        Validation,
                        "signal function returned shape {:?}, expected {:?}",
                        m.shape(),
                        (self.rows, self.cols)
                    );
                }
                m
            }
            SignalKind::Mapped { inner, f } => {
                let m = f(&inner.eval(t)?);
                if m.shape() != (self.rows, self.cols) {
                    bail!(
                        Validation,
                        "mapped signal returned shape {:?}, expected {:?}",
                        m.shape(),
                        (self.rows, self.cols)
                    );
                }
                m
            }
            SignalKind::Zipped { a, b, f } => {
                let m = f(&a.eval(t)?, &b.eval(t)?);
                if m.shape() != (self.rows, self.cols) {
                    bail!(
                        Validation,
                        "combined signal returned shape {:?}, expected {:?}",
                        m.shape(),
                        (self.rows, self.cols)
                    );
                }
                m
            }
        };
        if !m.is_finite() {
            bail!(Domain, "signal value at t = {t} is not finite");
        }
        Ok(m)
    }

    pub fn eval_vec(&self, t: f64) -> Result<Vec<f64>> {
        Ok(self.eval(t)?.into_vec())
    }

    pub fn eval_scalar(&self, t: f64) -> Result<f64> {
        Ok(self.eval(t)?[(0, 0)])
    }

    /// Sorted, de-duplicated discontinuities in `(0, until)`.
    pub fn switch_times(&self, until: f64) -> Vec<f64> {
        let mut out = Vec::new();
        self.push_switches(until, &mut out);
        out.retain(|&t| t > 0.0 && t < until);
        out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        out.dedup();
        out
    }

    fn push_switches(&self, until: f64, out: &mut Vec<f64>) {
        out.extend(self.extra_switches.iter().copied());
        match &self.kind {
            SignalKind::Waveforms(w) => w.iter().for_each(|w| w.push_switches(until, out)),
            SignalKind::Piecewise(segs) => {
                for s in segs {
                    if s.start > 0.0 {
                        out.push(s.start);
                    }
                    s.signal.push_switches(until.min(s.end), out);
                }
            }
            SignalKind::Mapped { inner, .. } => inner.push_switches(until, out),
            SignalKind::Zipped { a, b, .. } => {
                a.push_switches(until, out);
                b.push_switches(until, out);
            }
            _ => {}
        }
    }

    /// Upper bound on the sup-norm over `[0, horizon]` that follows from the
    /// signal's own description, or `None` if it cannot be bounded that way.
    /// Matrix values are bounded in the Frobenius norm.
    pub fn intrinsic_bound(&self, horizon: f64) -> Option<f64> {
        match &self.kind {
            SignalKind::Constant(m) => Some(m.norm_fro()),
            SignalKind::Waveforms(w) => {
                let b = w.iter().map(|w| {
                    let x = w.bound(horizon);
                    x * x
                });
                let s: f64 = b.sum();
                s.is_finite().then(|| s.sqrt())
            }
            SignalKind::Sampled { values, .. } => {
                Some(values.iter().map(Mat::norm_fro).fold(0.0, f64::max))
            }
            SignalKind::Piecewise(segs) => segs
                .iter()
                .filter(|s| s.start <= horizon)
                .map(|s| s.signal.intrinsic_bound(horizon.min(s.end)))
                .try_fold(0.0f64, |acc, b| b.map(|b| acc.max(b))),
            SignalKind::Func(_) | SignalKind::Mapped { .. } | SignalKind::Zipped { .. } => None,
        }
    }

    /// Bound used for boundedness checks: the declared one, else the
    /// intrinsic one.
    pub fn bound(&self, horizon: f64) -> Option<f64> {
        self.declared_bound
            .or_else(|| self.intrinsic_bound(horizon))
    }

    /// Largest norm over `samples` equally spaced points of `[0, horizon]`
    /// plus both sides of every switch time, using `norm` on each value.
    pub fn sampled_sup(
        &self,
        horizon: f64,
        samples: usize,
        norm: impl Fn(&Mat) -> f64,
    ) -> Result<f64> {
        let mut times: Vec<f64> = (0..=samples)
            .map(|i| horizon * i as f64 / samples.max(1) as f64)
            .collect();
        for s in self.switch_times(horizon) {
            times.push(s);
            times.push((s - 1e-9 * s.max(1.0)).max(0.0));
        }
        let mut sup = 0.0f64;
        for t in times {
            sup = sup.max(norm(&self.eval(t)?));
        }
        Ok(sup)
    }

    /// Checks finiteness over `[0, horizon)` and that any declared bound
    /// dominates the sampled values (Frobenius norm).
    pub fn validate(&self, horizon: f64, samples: usize) -> Result<()> {
        if self.horizon() < horizon {
            bail!(
                Validation,
                "signal is defined on [0, {}) but is needed on [0, {horizon})",
                self.horizon()
            );
        }
        if let Some(b) = self.declared_bound {
            if !(b.is_finite() && b >= 0.0) {
                bail!(
                    Validation,
                    "declared bound must be finite and non-negative, got {b}"
                );
            }
        }
        let sup = self.sampled_sup(horizon, samples, Mat::norm_fro)?;
        if let Some(b) = self.declared_bound {
            if sup > b * (1.0 + 1e-12) {
                bail!(
                    Validation,
                    "declared bound {b} is exceeded by a sampled value of norm {sup}"
                );
            }
        }
        Ok(())
    }

    /// New signal `f(self(t))` evaluated pointwise, keeping switch times.
    pub fn map(
        &self,
        rows: usize,
        cols: usize,
        f: impl Fn(&Mat) -> Mat + Send + Sync + 'static,
    ) -> Self {
        Self {
            rows,
            cols,
            kind: SignalKind::Mapped {
                inner: Arc::new(self.clone()),
                f: Arc::new(f),
            },
            declared_bound: None,
            extra_switches: Vec::new(),
        }
    }

    /// New signal `f(self(t), other(t))`, keeping the switch times of both.
    pub fn zip(
        &self,
        other: &Signal,
        rows: usize,
        cols: usize,
        f: impl Fn(&Mat, &Mat) -> Mat + Send + Sync + 'static,
    ) -> Self {
        Self {
            rows,
            cols,
            kind: SignalKind::Zipped {
                a: Arc::new(self.clone()),
                b: Arc::new(other.clone()),
                f: Arc::new(f),
            },
            declared_bound: None,
            extra_switches: Vec::new(),
        }
    }

    /// True when the signal has a finite bound over all of `[0, ∞)`.
    pub fn is_uniformly_bounded(&self) -> bool {
        self.bound(f64::INFINITY).is_some_and(f64::is_finite)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn square_wave_switches_and_values() {
        let w = Waveform::Square {
            high: 0.2,
            low: -0.2,
            period: 10.0,
            duty: 0.5,
            phase: 0.0,
        };
        assert_eq!(w.eval(0.0), 0.2);
        assert_eq!(w.eval(4.999), 0.2);
        assert_eq!(w.eval(5.0), -0.2);
        assert_eq!(w.eval(10.0), 0.2);
        let s = Signal::scaled(&Mat::identity(2), w).unwrap();
        assert_eq!(s.switch_times(21.0), vec![5.0, 10.0, 15.0, 20.0]);
        assert_eq!(s.eval(12.0).unwrap()[(1, 1)], 0.2);
        assert_eq!(s.eval(12.0).unwrap()[(0, 1)], 0.0);
    }

    #[test]
    fn sampled_interpolates_and_rejects_outside() {
        let s = Signal::sampled(
            vec![0.0, 1.0, 3.0],
            vec![Mat::scalar(0.0), Mat::scalar(2.0), Mat::scalar(-2.0)],
        )
        .unwrap();
        assert_eq!(s.eval_scalar(0.5).unwrap(), 1.0);
        assert_eq!(s.eval_scalar(2.0).unwrap(), 0.0);
        assert_eq!(s.eval_scalar(3.0).unwrap(), -2.0);
        assert!(s.eval(3.5).is_err());
        assert!(Signal::sampled(vec![0.0, 0.0], vec![Mat::scalar(0.0), Mat::scalar(1.0)]).is_err());
    }

    #[test]
    fn piecewise_partition_rules() {
        let seg = |a: f64, b: f64, v: f64| Segment {
            start: a,
            end: b,
            signal: Signal::scalar(v),
        };
        let s = Signal::piecewise(vec![seg(0.0, 2.0, 1.0), seg(2.0, 5.0, 3.0)]).unwrap();
        assert_eq!(s.eval_scalar(1.999).unwrap(), 1.0);
        assert_eq!(s.eval_scalar(2.0).unwrap(), 3.0);
        assert_eq!(s.eval_scalar(5.0).unwrap(), 3.0);
        assert!(s.eval(5.1).is_err());
        assert_eq!(s.switch_times(10.0), vec![2.0]);
        assert!(Signal::piecewise(vec![seg(0.0, 2.0, 1.0), seg(1.5, 5.0, 3.0)]).is_err());
        assert!(Signal::piecewise(vec![seg(0.5, 2.0, 1.0)]).is_err());
    }

    #[test]
    fn bounds() {
        let up = Signal::waveforms(
            1,
            1,
            vec![Waveform::Exp {
                amp: 1.0,
                rate: 0.1,
            }],
        )
        .unwrap();
        assert_eq!(up.intrinsic_bound(f64::INFINITY), None);
        let down = Signal::waveforms(
            1,
            1,
            vec![Waveform::Exp {
                amp: 2.0,
                rate: -1.0,
            }],
        )
        .unwrap();
        assert_eq!(down.intrinsic_bound(f64::INFINITY), Some(2.0));
        let bad = Signal::scalar(3.0).with_bound(1.0);
        assert!(bad.validate(10.0, 10).is_err());
        assert!(Signal::scalar(3.0)
            .with_bound(3.0)
            .validate(10.0, 10)
            .is_ok());
    }
}
