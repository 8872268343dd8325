use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use fracdyn_core::adaptive::{run_scenario, ExperimentReport, ModelType, SplitInfo};
use fracdyn_core::certificates::{
    certify, CertificateReport, CertifyOptions, MatrixNorm, PeEstimate,
};
use fracdyn_core::ml::{ml_matrix, ml_scalar};
use fracdyn_core::solver::{
    asymptotic_verdict, lp_fixed_point, solve_ivp, LpOptions, SolverMeta, Verdict,
};
use fracdyn_core::Mat;
use serde::Serialize;

use crate::artifacts::{ensure_dir, num, write_json, write_table, write_text};
use crate::cli::{AdaptArgs, CertifyArgs, MlArgs, SimulateArgs};
use crate::config::{load_scenario, load_system, to_toml, RunSettings, ScenarioFile, SystemFile};
use crate::error::{CliError, CliResult};

const DEFAULT_CERT_HORIZON: f64 = 50.0;
const DEFAULT_CERT_GRID: usize = 50;
const DEFAULT_TAIL_FRACTION: f64 = 0.1;
const DEFAULT_TOL_ZERO: f64 = 1e-2;

/// Evaluates the query and returns the printed text.
pub fn ml(args: &MlArgs) -> CliResult<String> {
    let core = |e| CliError::core("ml", e);
    if let Some(z) = args.z {
        let v = ml_scalar(args.alpha, args.beta, z).map_err(core)?;
        return Ok(if z.im == 0.0 {
            format!("{}\n", num(v.re))
        } else {
            format!("{} {}\n", num(v.re), num(v.im))
        });
    }
    let path = args
        .matrix_file
        .as_ref()
        .expect("clap requires z or matrix_file");
    let a = read_matrix(path)?;
    let m = ml_matrix(args.alpha, args.beta, &a, args.t).map_err(core)?;
    let mut out = String::new();
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(|&v| num(v)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    Ok(out)
}

/// Whitespace- or comma-separated rows; blank lines and `#` comments skipped.
fn read_matrix(path: &Path) -> CliResult<Mat> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(str::parse::<f64>)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Parse(format!("{}: line {}: {e}", path.display(), i + 1)))?;
        rows.push(row);
    }
    let m =
        Mat::from_rows(&rows).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    if !m.is_square() || m.rows() == 0 {
        return Err(CliError::Validation(format!(
            "{}: matrix must be square, got {}x{}",
            path.display(),
            m.rows(),
            m.cols()
        )));
    }
    Ok(m)
}

/// A certificate that applies was not computed. Sector-unstable systems have
/// no `C(α, A)`; that is a negative result, not a missing one.
fn incomplete(report: &CertificateReport) -> Option<String> {
    let missing: Vec<String> = report
        .notes
        .iter()
        .filter(|n| report.sector.is_stable() && !n.inapplicable)
        .map(|n| n.to_string())
        .collect();
    (!missing.is_empty()).then(|| missing.join("; "))
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn fmt_certificates(s: &mut String, r: &CertificateReport) {
    let _ = writeln!(
        s,
        "sector test (alpha = {}): {:?}",
        r.sector.alpha, r.sector.overall
    );
    for e in &r.sector.eigenvalues {
        let _ = writeln!(
            s,
            "  eigenvalue {:.6} {:+.6}i  arg {:.6}  margin {:+.6}  {:?}",
            e.eigenvalue.re, e.eigenvalue.im, e.argument, e.margin, e.class
        );
    }
    if let Some(c) = &r.c_alpha_a {
        let _ = writeln!(
            s,
            "C(alpha, A) = {:.8} (head {:.3e}, tail {:.3e}, {:?} norm)",
            c.value, c.head, c.tail, c.norm
        );
    }
    if let Some(q) = &r.q {
        let _ = writeln!(
            s,
            "q = {:.6} over {} grid points on (0, {}], worst at t = {}; q < 1 - {}: {}",
            q.q,
            q.grid_len,
            q.horizon,
            q.worst_time,
            q.grid_safety,
            yes(q.satisfied)
        );
    }
    if let Some(g) = &r.small_gain {
        let _ = writeln!(
            s,
            "small gain: sup |Q| = {:.6} vs 1/C = {:.6}: {}",
            g.sup_q,
            g.threshold,
            yes(g.satisfied)
        );
    }
    if let Some(pe) = &r.pe {
        let _ = writeln!(
            s,
            "persistent excitation: {} (epsilon {:.6e}, T0 {:?})",
            yes(pe.pe),
            pe.epsilon,
            pe.t0
        );
    }
    if let Some(mu) = r.mu {
        let _ = writeln!(s, "Lyapunov-Perron contraction ratio mu = {mu:.6}");
    }
    if let Some(m) = r.mu_bound {
        let _ = writeln!(s, "nonlinear contraction bound q + C L = {m:.6}");
    }
    let _ = writeln!(s, "certified: {}", yes(r.certified()));
    for n in &r.notes {
        let _ = writeln!(s, "note: {n}");
    }
}

#[derive(Serialize)]
struct CertifyOut<'a> {
    config: &'a SystemFile,
    options: &'a CertifyOptions,
    certified: bool,
    report: &'a CertificateReport,
}

fn certify_options(run: &RunSettings, args: &CertifyArgs) -> CertifyOptions {
    let horizon = args.horizon.or(run.horizon).unwrap_or(DEFAULT_CERT_HORIZON);
    let mut o = CertifyOptions::new(horizon, args.grid.or(run.grid).unwrap_or(DEFAULT_CERT_GRID));
    if let Some(v) = args.quad_tol.or(run.quad_tol) {
        o.quad_tol = v;
    }
    if let Some(v) = run.tol_arg {
        o.tol_arg = v;
    }
    if let Some(v) = run.grid_safety {
        o.grid_safety = v;
    }
    o.norm = args
        .norm
        .map(MatrixNorm::from)
        .or(run.norm)
        .unwrap_or_default();
    o.lp = args
        .lp_intervals
        .or(run.lp_intervals)
        .map(|n| LpOptions::new(horizon, n));
    o
}

fn check_options(o: &CertifyOptions) -> CliResult<()> {
    if !(o.horizon > 0.0 && o.horizon.is_finite()) || o.grid == 0 || !(o.quad_tol > 0.0) {
        return Err(CliError::Validation(format!(
            "certify: need a finite positive horizon, grid and quad_tol, got {}, {}, {}",
            o.horizon, o.grid, o.quad_tol
        )));
    }
    Ok(())
}

pub fn certify_cmd(args: &CertifyArgs) -> CliResult<()> {
    let (file, spec) = load_system(&args.system)?;
    let opts = certify_options(&file.run, args);
    check_options(&opts)?;
    let report = certify(&spec, &opts).map_err(|e| CliError::core("certify", e))?;
    let dir = &args.out.out;
    ensure_dir(dir)?;
    write_text(&dir.join("config.toml"), &to_toml(&file)?)?;
    write_json(
        &dir.join("report.json"),
        "certify",
        &CertifyOut {
            config: &file,
            options: &opts,
            certified: report.certified(),
            report: &report,
        },
    )?;
    let mut s = String::new();
    let _ = writeln!(s, "fracdyn certify: {}", args.system.display());
    let _ = writeln!(
        s,
        "dimension {}, orders {:?}",
        spec.dim(),
        spec.orders.as_slice()
    );
    let _ = writeln!(
        s,
        "horizon {}, grid {}, quad_tol {:e}",
        opts.horizon, opts.grid, opts.quad_tol
    );
    fmt_certificates(&mut s, &report);
    write_text(&dir.join("summary.txt"), &s)?;
    match incomplete(&report) {
        Some(n) => Err(CliError::Compute(format!("certificates not computed: {n}"))),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct LpSummary {
    intervals: usize,
    iterations: usize,
    mu: f64,
    converged: bool,
    /// Sup-norm difference to the predictor-corrector solution at LP nodes.
    sup_difference: f64,
}

#[derive(Serialize)]
struct SimulateOut<'a> {
    config: &'a SystemFile,
    t_end: f64,
    step: f64,
    points: usize,
    solver: &'a SolverMeta,
    final_time: f64,
    final_state: &'a [f64],
    verdict: Verdict,
    tail_fraction: f64,
    tol_zero: f64,
    lp: Option<LpSummary>,
}

fn state_header(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn simulate_cmd(args: &SimulateArgs) -> CliResult<()> {
    let (file, spec) = load_system(&args.system)?;
    let t_end = args.t_end.or(file.run.horizon).ok_or_else(|| {
        CliError::Validation("simulate: --t-end (or run.horizon) is required".into())
    })?;
    let step = args
        .step
        .or(file.run.step)
        .ok_or_else(|| CliError::Validation("simulate: --step (or run.step) is required".into()))?;
    let traj = solve_ivp(&spec, t_end, step).map_err(|e| CliError::core("simulate", e))?;
    let tail_fraction = file.run.tail_fraction.unwrap_or(DEFAULT_TAIL_FRACTION);
    let tol_zero = file.run.tol_zero.unwrap_or(DEFAULT_TOL_ZERO);
    let verdict = asymptotic_verdict(&traj, tail_fraction, tol_zero, traj.meta.ceiling);
    let dir = &args.out.out;
    ensure_dir(dir)?;
    write_text(&dir.join("config.toml"), &to_toml(&file)?)?;
    let mut header = vec!["t".to_string()];
    header.extend(state_header("x", spec.dim()));
    write_table(
        &dir.join("trajectory.csv"),
        &header,
        &traj.times,
        &traj.values,
    )?;

    let lp = match args.oracle {
        None => None,
        Some(_) => {
            let intervals = file
                .run
                .lp_intervals
                .unwrap_or_else(|| ((traj.final_time() / step).round() as usize).max(1));
            let r = lp_fixed_point(&spec, &LpOptions::new(traj.final_time(), intervals))
                .map_err(|e| CliError::core("simulate --oracle lp", e))?;
            write_table(&dir.join("lp_trajectory.csv"), &header, &r.times, &r.values)?;
            let sup_difference = r
                .times
                .iter()
                .zip(&r.values)
                .map(|(t, x)| {
                    traj.at(*t)
                        .iter()
                        .zip(x)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            Some(LpSummary {
                intervals,
                iterations: r.iterations,
                mu: r.mu,
                converged: r.converged,
                sup_difference,
            })
        }
    };
    let final_state = traj.values.last().map(Vec::as_slice).unwrap_or(&[]);
    let mut s = String::new();
    let _ = writeln!(s, "fracdyn simulate: {}", args.system.display());
    let _ = writeln!(
        s,
        "dimension {}, orders {:?}",
        spec.dim(),
        spec.orders.as_slice()
    );
    let _ = writeln!(
        s,
        "method {}, step {}, {} points, uniform grid: {}",
        traj.meta.method,
        step,
        traj.len(),
        yes(traj.meta.uniform_grid)
    );
    if let Some(t) = traj.meta.diverged_at {
        let _ = writeln!(
            s,
            "stopped at t = {t}: norm exceeded {:e}",
            traj.meta.ceiling
        );
    }
    let _ = writeln!(
        s,
        "final time {}, state {:?}",
        traj.final_time(),
        final_state
    );
    let _ = writeln!(
        s,
        "verdict: {verdict:?} (tail fraction {tail_fraction}, tol_zero {tol_zero:e})"
    );
    if let Some(l) = &lp {
        let _ = writeln!(
            s,
            "Lyapunov-Perron oracle: {} intervals, {} iterations, mu {:.6}, converged {}, sup difference {:.3e}",
            l.intervals,
            l.iterations,
            l.mu,
            yes(l.converged),
            l.sup_difference
        );
    }
    write_text(&dir.join("summary.txt"), &s)?;
    write_json(
        &dir.join("meta.json"),
        "simulate",
        &SimulateOut {
            config: &file,
            t_end,
            step,
            points: traj.len(),
            solver: &traj.meta,
            final_time: traj.final_time(),
            final_state,
            verdict,
            tail_fraction,
            tol_zero,
            lp,
        },
    )
}

#[derive(Serialize)]
struct AdaptOut<'a> {
    config: &'a ScenarioFile,
    name: &'a str,
    model: ModelType,
    split: &'a SplitInfo,
    pe: &'a PeEstimate,
    certificates: &'a CertificateReport,
    verdict_e: Verdict,
    verdict_phi: Verdict,
    tail_fraction: f64,
    tol_zero: f64,
    certified: bool,
    solver: &'a SolverMeta,
    final_time: f64,
    final_e: f64,
    final_phi_norm: f64,
}

/// Per-scenario outcome recorded in the batch index.
#[derive(Clone, Debug, Serialize)]
pub struct IndexEntry {
    pub file: PathBuf,
    pub name: String,
    pub dir: PathBuf,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exit_code: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelType>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict_e: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict_phi: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pe: Option<bool>,
}

fn write_experiment(dir: &Path, file: &ScenarioFile, r: &ExperimentReport) -> CliResult<()> {
    ensure_dir(dir)?;
    write_text(&dir.join("config.toml"), &to_toml(file)?)?;
    let traj = &r.trajectory;
    let n = traj.dim();
    let mut header = vec!["t".to_string()];
    match r.model {
        ModelType::TypeI => {
            header.extend(state_header("phi", n));
            header.push("e".into());
            let rows: Vec<Vec<f64>> = traj
                .values
                .iter()
                .zip(&r.e)
                .map(|(x, e)| x.iter().copied().chain([*e]).collect())
                .collect();
            write_table(&dir.join("trajectory.csv"), &header, &traj.times, &rows)?;
        }
        ModelType::TypeII => {
            header.push("e".into());
            header.extend(state_header("phi", n - 1));
            write_table(
                &dir.join("trajectory.csv"),
                &header,
                &traj.times,
                &traj.values,
            )?;
        }
    }
    let plot: Vec<Vec<f64>> = r
        .phi_norm
        .iter()
        .zip(&r.e)
        .map(|(p, e)| vec![*p, e.abs()])
        .collect();
    write_table(
        &dir.join("plot.csv"),
        &["t".into(), "phi_norm".into(), "abs_e".into()],
        &traj.times,
        &plot,
    )?;
    let last = |v: &[f64]| v.last().copied().unwrap_or(f64::NAN);
    write_json(
        &dir.join("report.json"),
        "adapt",
        &AdaptOut {
            config: file,
            name: &r.name,
            model: r.model,
            split: &r.split,
            pe: &r.pe,
            certificates: &r.certificates,
            verdict_e: r.verdict_e,
            verdict_phi: r.verdict_phi,
            tail_fraction: r.tail_fraction,
            tol_zero: r.tol_zero,
            certified: r.certified,
            solver: &traj.meta,
            final_time: traj.final_time(),
            final_e: last(&r.e),
            final_phi_norm: last(&r.phi_norm),
        },
    )?;
    let mut s = String::new();
    let _ = writeln!(s, "fracdyn adapt: {} ({:?})", r.name, r.model);
    let _ = writeln!(s, "split: {}", r.split.description);
    let _ = writeln!(
        s,
        "horizon {}, step {}, {} points",
        traj.final_time(),
        traj.meta.step,
        traj.len()
    );
    let _ = writeln!(
        s,
        "final |e| {:.6e}, final |phi| {:.6e}",
        last(&r.e).abs(),
        last(&r.phi_norm)
    );
    let _ = writeln!(
        s,
        "verdict e: {:?}, verdict phi: {:?} (tail fraction {}, tol_zero {:e})",
        r.verdict_e, r.verdict_phi, r.tail_fraction, r.tol_zero
    );
    fmt_certificates(&mut s, &r.certificates);
    let _ = writeln!(
        s,
        "convergence backed by a certificate: {}",
        yes(r.certified)
    );
    write_text(&dir.join("summary.txt"), &s)
}

fn run_one(path: &Path, dir: &Path) -> CliResult<ExperimentReport> {
    let (file, scn) = load_scenario(path)?;
    let r = run_scenario(&scn).map_err(|e| CliError::core(&format!("scenario {}", scn.name), e))?;
    write_experiment(dir, &file, &r)?;
    match incomplete(&r.certificates) {
        Some(n) => Err(CliError::Compute(format!(
            "scenario {}: certificates not computed: {n}",
            scn.name
        ))),
        None => Ok(r),
    }
}

fn entry(path: &Path, dir: PathBuf, res: &CliResult<ExperimentReport>) -> IndexEntry {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("scenario")
        .to_string();
    let mut e = IndexEntry {
        file: path.to_path_buf(),
        name: stem,
        dir,
        status: "ok",
        error: None,
        exit_code: None,
        model: None,
        verdict_e: None,
        verdict_phi: None,
        certified: None,
        pe: None,
    };
    match res {
        Ok(r) => {
            e.name = r.name.clone();
            e.model = Some(r.model);
            e.verdict_e = Some(r.verdict_e);
            e.verdict_phi = Some(r.verdict_phi);
            e.certified = Some(r.certified);
            e.pe = Some(r.pe.pe);
        }
        Err(err) => {
            e.status = "error";
            e.error = Some(err.to_string());
            e.exit_code = Some(err.exit_code());
        }
    }
    e
}

/// Runs the batch on `threads` workers; entries come back in file order.
pub fn run_batch(
    files: &[PathBuf],
    out: &Path,
    threads: usize,
) -> Vec<(IndexEntry, Option<CliError>)> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<(IndexEntry, Option<CliError>)>>> =
        Mutex::new((0..files.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..threads.clamp(1, files.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = files.get(i) else { break };
                let stem = path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or("scenario");
                let dir = out.join(stem);
                let res = run_one(path, &dir);
                let e = entry(path, dir, &res);
                slots
                    .lock()
                    .expect("no worker panics while holding the lock")[i] = Some((e, res.err()));
            });
        }
    });
    slots
        .into_inner()
        .expect("workers joined")
        .into_iter()
        .map(|s| s.expect("every slot filled"))
        .collect()
}

#[derive(Serialize)]
struct IndexOut<'a> {
    scenarios: Vec<&'a IndexEntry>,
}

pub fn adapt_cmd(args: &AdaptArgs) -> CliResult<()> {
    let out = &args.out.out;
    if let Some(path) = &args.scenario {
        return run_one(path, out).map(|_| ());
    }
    let dir = args
        .batch
        .as_ref()
        .expect("clap requires scenario or batch");
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Validation(format!(
            "{}: no *.toml scenarios found",
            dir.display()
        )));
    }
    let threads = args
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    ensure_dir(out)?;
    let results = run_batch(&files, out, threads);
    write_json(
        &out.join("index.json"),
        "adapt",
        &IndexOut {
            scenarios: results.iter().map(|(e, _)| e).collect(),
        },
    )?;
    match results.into_iter().find_map(|(_, err)| err) {
        Some(err) => Err(err),
        None => Ok(()),
    }
}
