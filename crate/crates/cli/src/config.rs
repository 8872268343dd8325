//! TOML configuration files: systems and adaptive scenarios.
//!
//! Parsing is strict: unknown keys are rejected and every file carries
//! `schema_version`. Relative paths are resolved against the directory of the
//! file that names them.

use std::fs;
use std::path::{Path, PathBuf};

use fracdyn_core::adaptive::{AdaptiveScenario, Gain, ModelType};
use fracdyn_core::certificates::MatrixNorm;
use fracdyn_core::signal::{Segment, Signal, Waveform};
use fracdyn_core::solver::{Nonlinearity, OrderSpec, PolyTerm, SystemSpec};
use fracdyn_core::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Matrix- or vector-valued signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalConfig {
    Constant {
        value: Mat,
    },
    /// One closed-form waveform per entry, row-major.
    Waveforms {
        rows: usize,
        cols: usize,
        entries: Vec<Waveform>,
    },
    /// `base · waveform(t)`.
    Scaled {
        base: Mat,
        waveform: Waveform,
    },
    /// Linear interpolation of a CSV with columns `t, entries row-major`.
    Sampled {
        rows: usize,
        cols: usize,
        csv: PathBuf,
    },
    Piecewise {
        segments: Vec<SegmentConfig>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentConfig {
    pub start: f64,
    pub end: f64,
    pub signal: SignalConfig,
}

impl SignalConfig {
    fn resolve_paths(&mut self, base: &Path) {
        match self {
            SignalConfig::Sampled { csv, .. } if csv.is_relative() => *csv = base.join(&*csv),
            SignalConfig::Piecewise { segments } => {
                for s in segments {
                    s.signal.resolve_paths(base);
                }
            }
            _ => {}
        }
    }

    pub fn to_signal(&self, key: &str) -> CliResult<Signal> {
        let core = |e| CliError::core(key, e);
        match self {
            SignalConfig::Constant { value } => Ok(Signal::constant(value.clone())),
            SignalConfig::Waveforms {
                rows,
                cols,
                entries,
            } => Signal::waveforms(*rows, *cols, entries.clone()).map_err(core),
            SignalConfig::Scaled { base, waveform } => {
                Signal::scaled(base, waveform.clone()).map_err(core)
            }
            SignalConfig::Sampled { rows, cols, csv } => {
                let (times, values) = read_samples(csv, *rows, *cols)?;
                Signal::sampled(times, values).map_err(core)
            }
            SignalConfig::Piecewise { segments } => {
                let segs = segments
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        Ok(Segment {
                            start: s.start,
                            end: s.end,
                            signal: s.signal.to_signal(&format!("{key}.segments[{i}]"))?,
                        })
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                Signal::piecewise(segs).map_err(core)
            }
        }
    }
}

fn read_samples(path: &Path, rows: usize, cols: usize) -> CliResult<(Vec<f64>, Vec<Mat>)> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::io(path, e))?;
    let (mut times, mut values) = (Vec::new(), Vec::new());
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        let nums = rec
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| {
                CliError::Parse(format!("{}: record {}: {e}", path.display(), line + 1))
            })?;
        if nums.len() != 1 + rows * cols {
            return Err(CliError::Parse(format!(
                "{}: record {} has {} columns, expected t plus {} entries",
                path.display(),
                line + 1,
                nums.len(),
                rows * cols
            )));
        }
        times.push(nums[0]);
        values.push(Mat::from_vec(rows, cols, nums[1..].to_vec()).expect("length checked"));
    }
    Ok((times, values))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LipschitzConfig {
    pub radius: f64,
    pub constant: f64,
}

/// Polynomial nonlinearity `f(x)` with an optional Lipschitz pair on a ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearityConfig {
    pub terms: Vec<PolyTerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<LipschitzConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    /// One order per component; a single entry applies to all.
    pub orders: Vec<f64>,
    pub a: Mat,
    pub x0: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xdot0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<SignalConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<SignalConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<NonlinearityConfig>,
}

fn broadcast_orders(orders: &[f64], n: usize, key: &str) -> CliResult<OrderSpec> {
    let v = if orders.len() == 1 {
        vec![orders[0]; n]
    } else {
        orders.to_vec()
    };
    if v.len() != n {
        return Err(CliError::Validation(format!(
            "{key}: {} orders given for dimension {n}",
            orders.len()
        )));
    }
    OrderSpec::new(v).map_err(|e| CliError::core(key, e))
}

impl SystemConfig {
    pub fn to_spec(&self) -> CliResult<SystemSpec> {
        let n = self.a.rows();
        if !self.a.is_square() || n == 0 {
            return Err(CliError::Validation(format!(
                "system.a: must be a non-empty square matrix, got {}x{}",
                n,
                self.a.cols()
            )));
        }
        let orders = broadcast_orders(&self.orders, n, "system.orders")?;
        if self.x0.len() != n {
            return Err(CliError::Validation(format!(
                "system.x0: has {} entries, expected {n}",
                self.x0.len()
            )));
        }
        let mut spec = SystemSpec::linear(orders, self.a.clone(), self.x0.clone());
        if let Some(v) = &self.xdot0 {
            spec = spec.with_xdot0(v.clone());
        }
        if let Some(q) = &self.q {
            let q = q.to_signal("system.q")?;
            if q.shape() != (n, n) {
                return Err(CliError::Validation(format!(
                    "system.q: shape {:?}, expected ({n}, {n})",
                    q.shape()
                )));
            }
            spec = spec.with_q(q);
        }
        if let Some(nu) = &self.nu {
            let nu = nu.to_signal("system.nu")?;
            if nu.shape() != (n, 1) {
                return Err(CliError::Validation(format!(
                    "system.nu: shape {:?}, expected ({n}, 1)",
                    nu.shape()
                )));
            }
            spec = spec.with_nu(nu);
        }
        if let Some(f) = &self.f {
            let mut nl = Nonlinearity::polynomial(n, f.terms.clone())
                .map_err(|e| CliError::core("system.f.terms", e))?;
            if let Some(l) = f.lipschitz {
                nl = nl.with_lipschitz(l.radius, l.constant);
            }
            spec = spec.with_f(nl);
        }
        spec.validate().map_err(|e| CliError::core("system", e))?;
        Ok(spec)
    }
}

/// Numerical settings; command-line flags take precedence.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSettings {
    /// Certificate horizon, or final time for `simulate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_arg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_safety: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<MatrixNorm>,
    /// Run the Lyapunov–Perron iteration with this many intervals.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lp_intervals: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_zero: Option<f64>,
    /// Reserved; the numerical core is deterministic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub schema_version: u32,
    #[serde(default)]
    pub run: RunSettings,
    pub system: SystemConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub model: ModelType,
    /// Information signal, a column vector.
    pub w: SignalConfig,
    /// Scalar perturbation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<SignalConfig>,
    /// Parameter-law orders, one per entry of `w` (or a single shared one).
    pub orders: Vec<f64>,
    /// Order of the error equation (type II).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_order: Option<f64>,
    #[serde(default)]
    pub gamma: Gain,
    #[serde(default)]
    pub normalize: bool,
    /// Decay rate of the error equation (type II).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    pub phi0: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phidot0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edot0: Option<f64>,
    pub horizon: f64,
    pub step: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pe_windows: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cert_horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cert_grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_zero: Option<f64>,
}

impl ScenarioConfig {
    pub fn to_scenario(&self, default_name: &str) -> CliResult<AdaptiveScenario> {
        let w = self.w.to_signal("scenario.w")?;
        let (n, c) = w.shape();
        if c != 1 || n == 0 {
            return Err(CliError::Validation(format!(
                "scenario.w: must be a column vector, got shape ({n}, {c})"
            )));
        }
        let orders = broadcast_orders(&self.orders, n, "scenario.orders")?;
        let mut scn =
            AdaptiveScenario::type_i(w, orders, self.phi0.clone(), self.horizon, self.step);
        scn.name = self
            .name
            .clone()
            .unwrap_or_else(|| default_name.to_string());
        scn.model = self.model;
        if let Some(nu) = &self.nu {
            scn.nu = Some(nu.to_signal("scenario.nu")?);
        }
        scn.e_order = self.e_order;
        scn.gamma = self.gamma.clone();
        scn.normalize = self.normalize;
        scn.a = self.a;
        scn.phidot0 = self.phidot0.clone();
        scn.e0 = self.e0;
        scn.edot0 = self.edot0;
        if let Some(v) = &self.pe_windows {
            scn.pe_windows = v.clone();
        }
        if let Some(v) = self.cert_horizon {
            scn.cert_horizon = v;
        }
        if let Some(v) = self.cert_grid {
            scn.cert_grid = v;
        }
        if let Some(v) = self.tail_fraction {
            scn.tail_fraction = v;
        }
        if let Some(v) = self.tol_zero {
            scn.tol_zero = v;
        }
        scn.validate().map_err(|e| CliError::core("scenario", e))?;
        Ok(scn)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub scenario: ScenarioConfig,
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn check_version(path: &Path, v: u32) -> CliResult<()> {
    if v != SCHEMA_VERSION {
        return Err(CliError::Validation(format!(
            "{}: schema_version: unsupported value {v}, expected {SCHEMA_VERSION}",
            path.display()
        )));
    }
    Ok(())
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> CliResult<T> {
    toml::from_str(text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

pub fn parse_system(path: &Path, text: &str) -> CliResult<SystemFile> {
    let mut f: SystemFile = parse(path, text)?;
    check_version(path, f.schema_version)?;
    let base = base_dir(path);
    for s in [&mut f.system.q, &mut f.system.nu].into_iter().flatten() {
        s.resolve_paths(&base);
    }
    Ok(f)
}

pub fn parse_scenario(path: &Path, text: &str) -> CliResult<ScenarioFile> {
    let mut f: ScenarioFile = parse(path, text)?;
    check_version(path, f.schema_version)?;
    let base = base_dir(path);
    f.scenario.w.resolve_paths(&base);
    if let Some(nu) = &mut f.scenario.nu {
        nu.resolve_paths(&base);
    }
    Ok(f)
}

/// Reads, parses and validates a system file.
pub fn load_system(path: &Path) -> CliResult<(SystemFile, SystemSpec)> {
    let f = parse_system(path, &read(path)?)?;
    let spec = f.system.to_spec()?;
    Ok((f, spec))
}

/// Reads, parses and validates a scenario file; the name defaults to the
/// file stem.
pub fn load_scenario(path: &Path) -> CliResult<(ScenarioFile, AdaptiveScenario)> {
    let f = parse_scenario(path, &read(path)?)?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("scenario");
    let scn = f.scenario.to_scenario(stem)?;
    Ok((f, scn))
}

/// Canonical TOML text of a parsed file.
pub fn to_toml<T: Serialize>(value: &T) -> CliResult<String> {
    toml::to_string(value).map_err(|e| CliError::Compute(format!("serializing configuration: {e}")))
}
