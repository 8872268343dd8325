//! Mittag-Leffler functions `E_{α,β}(z) = Σ_k z^k / Γ(αk + β)`.
//!
//! Scalars are evaluated by one of three representations depending on `|z|`:
//!
//! * `|z| ≤ 1`: the power series;
//! * `|z|^{1/α} ≥ 50`: the exponential-plus-algebraic asymptotic expansion;
//! * otherwise: inversion of the Laplace transform
//!   `s^{α-β} / (s^α - z)` on an optimal parabolic contour (Garrappa's
//!   algorithm), plus residues of the poles the contour leaves out.
//!
//! Matrix arguments go through a reordered complex Schur form with
//! clustered eigenvalues, Taylor expansion on each diagonal cluster and the
//! block Parlett recurrence for the coupling blocks.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{bail, Error, Result};
use crate::linalg::{sylvester_triangular, CMat, Mat, Schur};
use crate::special::{ln_gamma, recip_gamma};

const ASYMPTOTIC_RADIUS: f64 = 50.0;
const LOG_EPS_TARGET: f64 = -34.538_776_394_910_684; // ln(1e-15)
const LOG_EPS: f64 = -36.043_653_389_117_154; // ln(f64::EPSILON)

fn check_orders(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        bail!(Domain, "alpha must be finite and positive, got {alpha}");
    }
    if !(beta.is_finite() && beta > 0.0) {
        bail!(Domain, "beta must be finite and positive, got {beta}");
    }
    Ok(())
}

/// `E_{α,β}(z)` for complex `z`.
pub fn ml_scalar(alpha: f64, beta: f64, z: Complex64) -> Result<Complex64> {
    check_orders(alpha, beta)?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        bail!(Domain, "Mittag-Leffler argument must be finite, got {z}");
    }
    let r = z.norm();
    let value = if r == 0.0 {
        Complex64::new(recip_gamma(beta), 0.0)
    } else if r <= 1.0 {
        series(alpha, beta, z)
    } else if r.powf(1.0 / alpha) >= ASYMPTOTIC_RADIUS || (alpha == 1.0 && beta.fract() == 0.0) {
        // For α = 1 and integer β the algebraic part is a finite sum, so the
        // expansion is exact at every radius.
        asymptotic(alpha, beta, z)?
    } else {
        lt_inversion(alpha, beta, z)
    };
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(overflow(alpha, z));
    }
    Ok(value)
}

/// `E_{α,β}(x)` for real `x`.
pub fn ml_real(alpha: f64, beta: f64, x: f64) -> Result<f64> {
    Ok(ml_scalar(alpha, beta, Complex64::new(x, 0.0))?.re)
}

fn overflow(alpha: f64, z: Complex64) -> Error {
    let log_mag = z.norm().powf(1.0 / alpha) - alpha.ln();
    Error::Accuracy {
        message: format!(
            "E_alpha,beta({z}) overflows double precision (log-magnitude about {log_mag:.3e})"
        ),
        bound: log_mag,
    }
}

fn series(alpha: f64, beta: f64, z: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut zk = Complex64::new(1.0, 0.0);
    let mut small = 0;
    for k in 0..10_000 {
        let term = zk * recip_gamma(alpha * k as f64 + beta);
        sum += term;
        // 1/Γ is decreasing once its argument passes 2.
        if alpha * k as f64 + beta > 2.0 && term.norm() <= 1e-17 * sum.norm() {
            small += 1;
            if small >= 2 {
                break;
            }
        } else {
            small = 0;
        }
        zk *= z;
        if zk.norm() == 0.0 {
            break;
        }
    }
    sum
}

fn asymptotic(alpha: f64, beta: f64, z: Complex64) -> Result<Complex64> {
    let r = z.norm().powf(1.0 / alpha);
    let theta = z.arg();
    let kmin = ((-alpha * PI - theta) / (2.0 * PI)).floor() as i64 - 1;
    let kmax = ((alpha * PI - theta) / (2.0 * PI)).ceil() as i64 + 1;
    let mut exp_part = Complex64::new(0.0, 0.0);
    for k in kmin..=kmax {
        let ang = (theta + 2.0 * k as f64 * PI) / alpha;
        // Poles on the principal sheet; ±π is the same ray, count it once.
        if ang > PI * (1.0 + 1e-14) || ang <= -PI * (1.0 - 1e-14) {
            continue;
        }
        let s = Complex64::from_polar(r, ang);
        if s.re > 709.0 {
            return Err(overflow(alpha, z));
        }
        let pow = Complex64::from_polar(r.powf(1.0 - beta), (1.0 - beta) * ang);
        exp_part += pow * s.exp() / alpha;
    }
    let inv = z.inv();
    let ln_r = z.norm().ln();
    let mut zk = inv;
    let mut alg = Complex64::new(0.0, 0.0);
    let mut prev = f64::INFINITY;
    let scale = exp_part.norm();
    for k in 1..=2000 {
        let arg = beta - alpha * k as f64;
        alg += zk * recip_gamma(arg);
        // The reflected 1/Γ oscillates in sign; stop on its smooth envelope
        // |z|^{-k} Γ(1 - arg) / π instead of the raw term.
        let env = if arg < 0.5 {
            (-(k as f64) * ln_r + ln_gamma(1.0 - arg)).exp() / PI
        } else {
            zk.norm() * recip_gamma(arg).abs()
        };
        if arg < 0.5 && env > prev {
            break;
        }
        if arg < 0.5 {
            prev = env;
        }
        if env <= 1e-18 * (alg.norm() + scale) {
            break;
        }
        zk *= inv;
    }
    Ok(exp_part - alg)
}

struct ContourParams {
    mu: f64,
    h: f64,
    n: f64,
}

fn optimal_param_rb(
    t: f64,
    phi_j: f64,
    phi_j1: f64,
    pj: f64,
    qj: f64,
    log_epsilon: f64,
) -> ContourParams {
    let fac = 1.01;
    let f_max = (log_epsilon - LOG_EPS).exp();
    let sq_phi_j = phi_j.sqrt();
    let threshold = 2.0 * ((log_epsilon - LOG_EPS) / t).sqrt();
    let sq_phi_j1 = phi_j1.sqrt().min(threshold - sq_phi_j);
    let none = ContourParams {
        mu: 0.0,
        h: 0.0,
        n: f64::INFINITY,
    };
    let (sq_bar_j, sq_bar_j1, f_bar) = if pj < 1e-14 && qj < 1e-14 {
        (sq_phi_j, sq_phi_j1, 1.0)
    } else if pj < 1e-14 {
        let f_min = if sq_phi_j > 0.0 {
            fac * (sq_phi_j / (sq_phi_j1 - sq_phi_j)).powf(qj)
        } else {
            fac
        };
        if f_min >= f_max {
            return none;
        }
        let f_bar = f_min + f_min / f_max * (f_max - f_min);
        let fq = f_bar.powf(-1.0 / qj);
        (
            sq_phi_j,
            (2.0 * sq_phi_j1 - fq * sq_phi_j) / (2.0 + fq),
            f_bar,
        )
    } else if qj < 1e-14 {
        let f_min = fac * (sq_phi_j1 / (sq_phi_j1 - sq_phi_j)).powf(pj);
        if f_min >= f_max {
            return none;
        }
        let f_bar = f_min + f_min / f_max * (f_max - f_min);
        let fp = f_bar.powf(-1.0 / pj);
        (
            (2.0 * sq_phi_j + fp * sq_phi_j1) / (2.0 - fp),
            sq_phi_j1,
            f_bar,
        )
    } else {
        let f_min = fac * (sq_phi_j + sq_phi_j1) / (sq_phi_j1 - sq_phi_j).powf(pj.max(qj));
        if f_min >= f_max {
            return none;
        }
        let f_min = f_min.max(1.5);
        let f_bar = f_min + f_min / f_max * (f_max - f_min);
        let fp = f_bar.powf(-1.0 / pj);
        let fq = f_bar.powf(-1.0 / qj);
        let w = -phi_j1 * t / log_epsilon;
        let den = 2.0 + w - (1.0 + w) * fp + fq;
        (
            ((2.0 + w + fq) * sq_phi_j + fp * sq_phi_j1) / den,
            (-(1.0 + w) * fq * sq_phi_j + (2.0 + w - (1.0 + w) * fp) * sq_phi_j1) / den,
            f_bar,
        )
    };
    let log_epsilon = log_epsilon - f_bar.ln();
    let w = -sq_bar_j1 * sq_bar_j1 * t / log_epsilon;
    let mu = (((1.0 + w) * sq_bar_j + sq_bar_j1) / (2.0 + w)).powi(2);
    let h = -2.0 * PI / log_epsilon * (sq_bar_j1 - sq_bar_j) / ((1.0 + w) * sq_bar_j + sq_bar_j1);
    let n = ((1.0 - log_epsilon / t / mu).sqrt() / h).ceil();
    if !(mu > 0.0 && h > 0.0 && n.is_finite()) {
        return none;
    }
    ContourParams { mu, h, n }
}

fn optimal_param_ru(t: f64, phi_j: f64, pj: f64, log_epsilon: f64) -> ContourParams {
    let sq_phi_j = phi_j.sqrt();
    let mut phibar = if phi_j > 0.0 { phi_j * 1.01 } else { 0.01 };
    let mut sq_phibar = phibar.sqrt();
    let (f_min, f_max, f_tar) = (1.0, 10.0, 5.0);
    let mut nj;
    let mut a;
    let mut sq_mu;
    let mut guard = 0;
    loop {
        let phi_t = phibar * t;
        let log_eps_phi_t = log_epsilon / phi_t;
        nj = (phi_t / PI * (1.0 - 1.5 * log_eps_phi_t + (1.0 - 2.0 * log_eps_phi_t).sqrt())).ceil();
        a = PI * nj / phi_t;
        sq_mu = sq_phibar * (4.0 - a).abs() / (7.0 - (1.0 + 12.0 * a).sqrt()).abs();
        let fbar = ((sq_phibar - sq_phi_j) / sq_mu).powf(-pj);
        guard += 1;
        if pj < 1e-14 || (f_min < fbar && fbar < f_max) || guard > 100 {
            break;
        }
        sq_phibar = f_tar.powf(-1.0 / pj) * sq_mu;
        phibar = sq_phibar * sq_phibar;
    }
    let mut mu = sq_mu * sq_mu;
    let mut h = (-3.0 * a - 2.0 + 2.0 * (1.0 + 12.0 * a).sqrt()) / (4.0 - a) / nj;
    let threshold = (log_epsilon - LOG_EPS) / t;
    if mu > threshold {
        let qv = if pj.abs() < 1e-14 {
            0.0
        } else {
            f_tar.powf(-1.0 / pj) * mu.sqrt()
        };
        let phibar = (qv + phi_j.sqrt()).powi(2);
        if phibar < threshold {
            let w = (LOG_EPS / (LOG_EPS - log_epsilon)).sqrt();
            let u = (-phibar * t / LOG_EPS).sqrt();
            mu = threshold;
            nj = (w * log_epsilon / 2.0 / PI / (u * w - 1.0)).ceil();
            h = (LOG_EPS / (LOG_EPS - log_epsilon)).sqrt() / nj;
        } else {
            nj = f64::INFINITY;
            h = 0.0;
        }
    }
    ContourParams { mu, h, n: nj }
}

fn lt_inversion(alpha: f64, beta: f64, lambda: Complex64) -> Complex64 {
    let t = 1.0;
    let theta = lambda.arg();
    let kmin = (-alpha / 2.0 - theta / (2.0 * PI)).ceil() as i64;
    let kmax = (alpha / 2.0 - theta / (2.0 * PI)).floor() as i64;
    let rad = lambda.norm().powf(1.0 / alpha);
    let mut poles: Vec<(f64, Complex64)> = (kmin..=kmax)
        .map(|k| {
            let s = Complex64::from_polar(rad, (theta + 2.0 * k as f64 * PI) / alpha);
            ((s.re + s.norm()) / 2.0, s)
        })
        .filter(|(phi, _)| *phi > 1e-15)
        .collect();
    poles.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
    let mut s_star = vec![Complex64::new(0.0, 0.0)];
    let mut phi = vec![0.0];
    for (p, s) in &poles {
        phi.push(*p);
        s_star.push(*s);
    }
    let j1 = s_star.len();
    let mut p = vec![1.0; j1];
    p[0] = (-2.0 * (alpha - beta + 1.0)).max(0.0);
    let mut q = vec![1.0; j1];
    q[j1 - 1] = f64::INFINITY;
    phi.push(f64::INFINITY);
    let admissible: Vec<usize> = (0..j1)
        .filter(|&j| phi[j] < (LOG_EPS_TARGET - LOG_EPS) / t && phi[j] < phi[j + 1])
        .collect();

    let mut log_epsilon = LOG_EPS_TARGET;
    let mut best = (
        0usize,
        ContourParams {
            mu: 0.0,
            h: 0.0,
            n: f64::INFINITY,
        },
    );
    for _ in 0..15 {
        best = (
            0,
            ContourParams {
                mu: 0.0,
                h: 0.0,
                n: f64::INFINITY,
            },
        );
        for &j in &admissible {
            let prm = if j + 1 < j1 {
                optimal_param_rb(t, phi[j], phi[j + 1], p[j], q[j], log_epsilon)
            } else {
                optimal_param_ru(t, phi[j], p[j], log_epsilon)
            };
            if prm.n < best.1.n {
                best = (j, prm);
            }
        }
        if best.1.n > 200.0 {
            log_epsilon += core::f64::consts::LN_10;
        } else {
            break;
        }
    }
    let (region, prm) = best;
    let n = prm.n as i64;
    let mut integral = Complex64::new(0.0, 0.0);
    for k in -n..=n {
        let u = prm.h * k as f64;
        let z = Complex64::new(1.0, u).powi(2) * prm.mu;
        let zd = Complex64::new(-2.0 * prm.mu * u, 2.0 * prm.mu);
        let f = z.powf(alpha - beta) / (z.powf(alpha) - lambda) * zd;
        integral += (z * t).exp() * f;
    }
    integral = integral * prm.h / Complex64::new(0.0, 2.0 * PI);
    let mut residues = Complex64::new(0.0, 0.0);
    for s in &s_star[region + 1..] {
        residues += s.powf(1.0 - beta) * (s * t).exp() / alpha;
    }
    let e = integral + residues;
    if lambda.im == 0.0 {
        Complex64::new(e.re, 0.0)
    } else {
        e
    }
}

/// Coefficients `c_k = f^{(k)}(σ)/k!`, `k < count`, of `f = E_{α,β}`.
fn taylor_coefficients(
    alpha: f64,
    beta: f64,
    sigma: Complex64,
    radius: f64,
    count: usize,
) -> Result<Vec<Complex64>> {
    let mut c = vec![Complex64::new(0.0, 0.0); count];
    if sigma.norm() <= 0.25 {
        // Differentiated power series: c_k = Σ_{j≥k} C(j,k) σ^{j-k} / Γ(αj+β).
        for (k, ck) in c.iter_mut().enumerate() {
            let mut binom = 1.0;
            let mut sp = Complex64::new(1.0, 0.0);
            let mut small = 0;
            for j in k..k + 2000 {
                if j > k {
                    binom *= j as f64 / (j - k) as f64;
                    sp *= sigma;
                }
                let term = sp * binom * recip_gamma(alpha * j as f64 + beta);
                *ck += term;
                if alpha * j as f64 + beta > 2.0 && term.norm() <= 1e-18 * ck.norm().max(1e-300) {
                    small += 1;
                    if small > 2 {
                        break;
                    }
                }
                if sp.norm() == 0.0 && j > k {
                    break;
                }
            }
        }
        return Ok(c);
    }
    // Cauchy integral on the circle |ζ - σ| = radius, trapezoidal rule.
    let m = 64usize.max(4 * count);
    let mut vals = Vec::with_capacity(m);
    for i in 0..m {
        let th = 2.0 * PI * i as f64 / m as f64;
        vals.push(ml_scalar(
            alpha,
            beta,
            sigma + Complex64::from_polar(radius, th),
        )?);
    }
    for (k, ck) in c.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, v) in vals.iter().enumerate() {
            let th = 2.0 * PI * (k * i % m) as f64 / m as f64;
            acc += *v * Complex64::from_polar(1.0, -th);
        }
        *ck = acc / (m as f64 * radius.powi(k as i32));
    }
    Ok(c)
}

/// Prepared matrix Mittag-Leffler evaluator for a fixed matrix `A`.
///
/// The Schur form, the eigenvalue clusters and the reordering are computed
/// once; [`MatrixMl::eval`] then produces `E_{α,β}(t^α A)` for any `α`, `β`,
/// `t`.
#[derive(Clone, Debug)]
pub struct MatrixMl {
    schur: Schur,
    /// Half-open index ranges of the diagonal clusters of `schur.t`.
    blocks: Vec<(usize, usize)>,
    real: bool,
}

/// Relative distance under which eigenvalues are placed in one cluster.
pub const CLUSTER_TOL: f64 = 1e-6;
const COMMUTATOR_TOL: f64 = 1e-7;

impl MatrixMl {
    pub fn new(a: &Mat) -> Result<Self> {
        let mut m = Self::new_complex(&a.to_complex())?;
        m.real = true;
        Ok(m)
    }

    pub fn new_complex(a: &CMat) -> Result<Self> {
        if !a.is_square() {
            bail!(
                Validation,
                "Mittag-Leffler matrix argument must be square, got {}x{}",
                a.rows(),
                a.cols()
            );
        }
        let mut schur = Schur::new(a)?;
        let ev = schur.eigenvalues();
        let n = ev.len();
        let floor = CLUSTER_TOL * 1e-4 * a.norm_fro();
        // Single-linkage clustering.
        let mut label: Vec<usize> = (0..n).collect();
        for i in 0..n {
            for j in i + 1..n {
                let d = (ev[i] - ev[j]).norm();
                if d <= CLUSTER_TOL * ev[i].norm().max(ev[j].norm()) || d <= floor {
                    let (li, lj) = (label[i], label[j]);
                    if li != lj {
                        let (keep, drop) = (li.min(lj), li.max(lj));
                        for l in label.iter_mut() {
                            if *l == drop {
                                *l = keep;
                            }
                        }
                    }
                }
            }
        }
        // Relabel by first appearance so the reordering moves as little as
        // possible.
        let mut order: Vec<usize> = Vec::new();
        for &l in &label {
            if !order.contains(&l) {
                order.push(l);
            }
        }
        let compact: Vec<usize> = label
            .iter()
            .map(|l| order.iter().position(|o| o == l).unwrap_or(0))
            .collect();
        let sorted = schur.group_by(&compact);
        let mut blocks = Vec::new();
        let mut start = 0;
        for i in 1..=n {
            if i == n || sorted[i] != sorted[start] {
                blocks.push((start, i));
                start = i;
            }
        }
        Ok(Self {
            schur,
            blocks,
            real: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.schur.t.rows()
    }

    /// Cluster sizes and their mean eigenvalues.
    pub fn clusters(&self) -> Vec<(Complex64, usize)> {
        self.blocks
            .iter()
            .map(|&(s, e)| {
                let sum: Complex64 = (s..e).map(|i| self.schur.t[(i, i)]).sum();
                (sum / (e - s) as f64, e - s)
            })
            .collect()
    }

    /// `E_{α,β}(t^α A)` as a complex matrix.
    pub fn eval_complex(&self, alpha: f64, beta: f64, t: f64) -> Result<CMat> {
        check_orders(alpha, beta)?;
        if !(t.is_finite() && t >= 0.0) {
            bail!(
                Domain,
                "time scale must be finite and non-negative, got {t}"
            );
        }
        let n = self.dim();
        if t == 0.0 || n == 0 {
            return Ok(CMat::identity(n).scale(Complex64::new(recip_gamma(beta), 0.0)));
        }
        let ts = self.schur.t.scale(Complex64::new(t.powf(alpha), 0.0));
        let f = self.parlett(alpha, beta, &ts)?;
        Ok(&(&self.schur.u * &f) * &self.schur.u.adjoint())
    }

    /// `E_{α,β}(t^α A)`; for a real `A` the (rounding-level) imaginary part is
    /// dropped.
    pub fn eval(&self, alpha: f64, beta: f64, t: f64) -> Result<Mat> {
        Ok(self.eval_complex(alpha, beta, t)?.re())
    }

    /// Kernel `t^{α-1} E_{α,α}(t^α A)`.
    pub fn kernel(&self, alpha: f64, t: f64) -> Result<Mat> {
        if !(t.is_finite() && t >= 0.0) {
            bail!(
                Domain,
                "kernel time must be finite and non-negative, got {t}"
            );
        }
        if t == 0.0 {
            if alpha < 1.0 {
                bail!(
                    Domain,
                    "kernel is singular at t = 0 for alpha = {alpha} < 1"
                );
            }
            let v = if alpha == 1.0 { 1.0 } else { 0.0 };
            return Ok(Mat::identity(self.dim()).scale(v));
        }
        Ok(self.eval(alpha, alpha, t)?.scale(t.powf(alpha - 1.0)))
    }

    /// `∫₀^t kernel = t^α E_{α,α+1}(t^α A)`.
    pub fn kernel_integral(&self, alpha: f64, t: f64) -> Result<Mat> {
        if t == 0.0 {
            return Ok(Mat::zeros(self.dim(), self.dim()));
        }
        Ok(self.eval(alpha, alpha + 1.0, t)?.scale(t.powf(alpha)))
    }

    /// `∫₀^t (t - s) kernel(s) ds = t^{α+1} E_{α,α+2}(t^α A)`.
    pub fn kernel_second_integral(&self, alpha: f64, t: f64) -> Result<Mat> {
        if t == 0.0 {
            return Ok(Mat::zeros(self.dim(), self.dim()));
        }
        Ok(self.eval(alpha, alpha + 2.0, t)?.scale(t.powf(alpha + 1.0)))
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    fn parlett(&self, alpha: f64, beta: f64, t: &CMat) -> Result<CMat> {
        let n = t.rows();
        let nb = self.blocks.len();
        let mut f = CMat::zeros(n, n);
        for &(s, e) in &self.blocks {
            let tb = t.submatrix(s, e, s, e);
            let fb = self.cluster_function(alpha, beta, &tb)?;
            f.set_submatrix(s, s, &fb);
        }
        for d in 1..nb {
            for bi in 0..nb - d {
                let bj = bi + d;
                let (is, ie) = self.blocks[bi];
                let (js, je) = self.blocks[bj];
                let tii = t.submatrix(is, ie, is, ie);
                let tjj = t.submatrix(js, je, js, je);
                let tij = t.submatrix(is, ie, js, je);
                let fii = f.submatrix(is, ie, is, ie);
                let fjj = f.submatrix(js, je, js, je);
                let mut rhs = &(&fii * &tij) - &(&tij * &fjj);
                for bk in bi + 1..bj {
                    let (ks, ke) = self.blocks[bk];
                    let fik = f.submatrix(is, ie, ks, ke);
                    let tkj = t.submatrix(ks, ke, js, je);
                    let tik = t.submatrix(is, ie, ks, ke);
                    let fkj = f.submatrix(ks, ke, js, je);
                    rhs = &(&rhs + &(&fik * &tkj)) - &(&tik * &fkj);
                }
                let x = sylvester_triangular(&tii, &tjj, &rhs)?;
                f.set_submatrix(is, js, &x);
            }
        }
        if !f.is_finite() {
            return Err(Error::Accuracy {
                message: format!(
                    "matrix Mittag-Leffler value is not finite ({})",
                    self.describe_clusters()
                ),
                bound: f64::INFINITY,
            });
        }
        let tf = t.norm_fro();
        let ff = f.norm_fro();
        if tf > 0.0 && ff > 0.0 {
            let comm = (&(t * &f) - &(&f * t)).norm_fro() / (tf * ff);
            if comm > COMMUTATOR_TOL {
                return Err(Error::Accuracy {
                    message: format!(
                        "Schur-Parlett evaluation lost accuracy: relative commutator residual {comm:.3e} ({})",
                        self.describe_clusters()
                    ),
                    bound: comm,
                });
            }
        }
        Ok(f)
    }

    fn cluster_function(&self, alpha: f64, beta: f64, tb: &CMat) -> Result<CMat> {
        let m = tb.rows();
        if m == 1 {
            return Ok(CMat::scalar(ml_scalar(alpha, beta, tb[(0, 0)])?));
        }
        let sigma: Complex64 = tb.diag().iter().sum::<Complex64>() / m as f64;
        let mut nmat = tb.clone();
        for i in 0..m {
            nmat[(i, i)] -= sigma;
        }
        let f0 = ml_scalar(alpha, beta, sigma)?;
        if nmat.max_abs() == 0.0 {
            return Ok(CMat::identity(m).scale(f0));
        }
        let spread = tb
            .diag()
            .iter()
            .map(|l| (*l - sigma).norm())
            .fold(0.0, f64::max);
        let mag = sigma.norm().max(1.0);
        let algebraic = 0.5 * mag;
        let exponential = 2.0 * alpha * mag.powf(1.0 - 1.0 / alpha);
        let radius = algebraic.min(exponential).max(10.0 * spread).max(1e-3);
        let count = 24usize.max(m + 8);
        let c = taylor_coefficients(alpha, beta, sigma, radius, count)?;
        let mut out = CMat::identity(m).scale(c[0]);
        let mut pw = CMat::identity(m);
        let mut converged = false;
        for (k, ck) in c.iter().enumerate().skip(1) {
            pw = &pw * &nmat;
            let term = pw.scale(*ck);
            out = &out + &term;
            if k >= m && term.max_abs() <= 1e-16 * out.max_abs() {
                converged = true;
                break;
            }
            if pw.max_abs() == 0.0 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Accuracy {
                message: format!(
                    "Taylor expansion on a cluster of {m} eigenvalues around {sigma} did not converge ({})",
                    self.describe_clusters()
                ),
                bound: pw.max_abs(),
            });
        }
        Ok(out)
    }

    fn describe_clusters(&self) -> alloc::string::String {
        let parts: Vec<alloc::string::String> = self
            .clusters()
            .iter()
            .map(|(c, k)| format!("{k}x at {:.6e}{:+.6e}i", c.re, c.im))
            .collect();
        format!("clusters: {}", parts.join(", "))
    }
}

/// `E_{α,β}(t^α A)` for a real square matrix.
pub fn ml_matrix(alpha: f64, beta: f64, a: &Mat, t: f64) -> Result<Mat> {
    MatrixMl::new(a)?.eval(alpha, beta, t)
}

/// `E_{α,β}(t^α A)` for a complex square matrix.
pub fn ml_matrix_complex(alpha: f64, beta: f64, a: &CMat, t: f64) -> Result<CMat> {
    MatrixMl::new_complex(a)?.eval_complex(alpha, beta, t)
}

/// Kernel `t^{α-1} E_{α,α}(t^α A)`.
pub fn ml_kernel(alpha: f64, a: &Mat, t: f64) -> Result<Mat> {
    MatrixMl::new(a)?.kernel(alpha, t)
}

/// Scalar kernel `t^{α-1} E_{α,α}(a t^α)`.
pub fn kernel_scalar(alpha: f64, a: f64, t: f64) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        bail!(
            Domain,
            "kernel time must be finite and non-negative, got {t}"
        );
    }
    if t == 0.0 {
        if alpha < 1.0 {
            bail!(
                Domain,
                "kernel is singular at t = 0 for alpha = {alpha} < 1"
            );
        }
        return Ok(if alpha == 1.0 { 1.0 } else { 0.0 });
    }
    let ta = t.powf(alpha);
    Ok(t.powf(alpha - 1.0) * ml_real(alpha, alpha, a * ta)?)
}

/// Scalar `∫₀^t kernel = t^α E_{α,α+1}(a t^α)`.
pub fn kernel_integral_scalar(alpha: f64, a: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let ta = t.powf(alpha);
    Ok(ta * ml_real(alpha, alpha + 1.0, a * ta)?)
}

/// Scalar `∫₀^t (t - s) kernel(s) ds = t^{α+1} E_{α,α+2}(a t^α)`.
pub fn kernel_second_integral_scalar(alpha: f64, a: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let ta = t.powf(alpha);
    Ok(ta * t * ml_real(alpha, alpha + 2.0, a * ta)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn exponential_identity_all_regimes() {
        for i in 0..=400 {
            let x = -100.0 + 0.5 * i as f64;
            let v = ml_real(1.0, 1.0, x).unwrap();
            let e = x.exp();
            assert!(
                (v - e).abs() <= 1e-12 * e.max(1e-300) + 1e-300,
                "x={x}: {v} vs {e}"
            );
        }
    }

    #[test]
    fn cosine_identity() {
        for i in 0..=200 {
            let x = 0.05 * i as f64;
            let v = ml_real(2.0, 1.0, -x * x).unwrap();
            assert!((v - x.cos()).abs() <= 1e-12, "x={x}: {v} vs {}", x.cos());
        }
    }

    #[test]
    fn known_closed_forms() {
        // E_{1,2}(z) = (e^z - 1)/z
        for &z in &[-30.0, -3.0, -0.5, 0.5, 4.0, 60.0] {
            let v = ml_real(1.0, 2.0, z).unwrap();
            let e: f64 = (z.exp() - 1.0) / z;
            assert!((v - e).abs() <= 1e-12 * e.abs(), "z={z}: {v} vs {e}");
        }
        // E_{1/2,1}(-x) = exp(x^2) erfc(x)
        for &x in &[0.3, 1.0, 2.5, 6.0, 20.0] {
            let v = ml_real(0.5, 1.0, -x).unwrap();
            let e = libm::exp(x * x) * libm::erfc(x);
            assert!((v - e).abs() <= 1e-10 * e, "x={x}: {v} vs {e}");
        }
        // E_{2,2}(-x^2) = sin(x)/x
        for &x in &[0.4, 3.0, 17.0, 31.0] {
            let v = ml_real(2.0, 2.0, -x * x).unwrap();
            let e = x.sin() / x;
            assert!((v - e).abs() <= 1e-12, "x={x}: {v} vs {e}");
        }
    }

    #[test]
    fn zero_argument_and_domain_errors() {
        assert_eq!(ml_real(0.7, 0.7, 0.0).unwrap(), 1.0 / gamma(0.7));
        assert!(matches!(ml_scalar(0.0, 1.0, c(1.0)), Err(Error::Domain(_))));
        assert!(matches!(
            ml_scalar(0.5, -1.0, c(1.0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            ml_scalar(0.5, 1.0, c(f64::NAN)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            ml_scalar(0.5, 1.0, c(1e6)),
            Err(Error::Accuracy { .. })
        ));
    }

    #[test]
    fn regime_boundaries_are_continuous() {
        for &alpha in &[0.3, 0.8, 1.2, 1.7] {
            for &sign in &[-1.0, 1.0] {
                for r in [1.0, ASYMPTOTIC_RADIUS.powf(alpha)] {
                    let below = ml_real(alpha, 1.1, sign * r * (1.0 - 4.0 * f64::EPSILON)).unwrap();
                    let above = ml_real(alpha, 1.1, sign * r * (1.0 + 4.0 * f64::EPSILON)).unwrap();
                    assert!(
                        (below - above).abs() <= 1e-10 * below.abs().max(1e-10),
                        "alpha={alpha} r={r}: {below} vs {above}"
                    );
                }
            }
        }
    }

    #[test]
    fn matrix_diagonal_and_nilpotent() {
        let a = Mat::from_diag(&[-1.0, -2.0]);
        let e = ml_matrix(0.5, 1.0, &a, 1.0).unwrap();
        assert!((e[(0, 0)] - ml_real(0.5, 1.0, -1.0).unwrap()).abs() < 1e-14);
        assert!((e[(1, 1)] - ml_real(0.5, 1.0, -2.0).unwrap()).abs() < 1e-14);
        assert_eq!(e[(0, 1)], 0.0);

        let nil = Mat::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        for &(alpha, beta) in &[(0.5, 1.0), (1.3, 0.7), (0.9, 0.9)] {
            let e = ml_matrix(alpha, beta, &nil, 1.0).unwrap();
            assert!((e[(0, 0)] - 1.0 / gamma(beta)).abs() < 1e-15);
            assert!((e[(1, 1)] - 1.0 / gamma(beta)).abs() < 1e-15);
            assert!((e[(0, 1)] - 1.0 / gamma(alpha + beta)).abs() < 1e-14);
            assert_eq!(e[(1, 0)], 0.0);
        }

        let z = ml_matrix(0.8, 1.4, &Mat::zeros(3, 3), 2.0).unwrap();
        assert!((&z - &Mat::identity(3).scale(1.0 / gamma(1.4))).max_abs() < 1e-16);
    }

    #[test]
    fn matrix_exponential_of_jordan_block() {
        // exp(t [[-1, 1], [0, -1]]) = e^{-t} [[1, t], [0, 1]]
        let a = Mat::from_rows(&[[-1.0, 1.0], [0.0, -1.0]]).unwrap();
        for &t in &[0.5, 3.0, 20.0] {
            let e = ml_matrix(1.0, 1.0, &a, t).unwrap();
            let et = (-t).exp();
            assert!((e[(0, 0)] - et).abs() <= 1e-12 * et);
            assert!(
                (e[(0, 1)] - t * et).abs() <= 1e-10 * t * et,
                "t={t}: {} vs {}",
                e[(0, 1)],
                t * et
            );
        }
    }

    #[test]
    fn matrix_exponential_rotation() {
        // exp(t [[0, -w], [w, 0]]) is a rotation.
        let a = Mat::from_rows(&[[-0.1, -2.0], [2.0, -0.1]]).unwrap();
        let t = 3.0;
        let e = ml_matrix(1.0, 1.0, &a, t).unwrap();
        let d = (-0.1 * t).exp();
        let (s, co) = (2.0 * t).sin_cos();
        let expect = Mat::from_rows(&[[d * co, -d * s], [d * s, d * co]]).unwrap();
        assert!((&e - &expect).max_abs() < 1e-12);
    }

    #[test]
    fn kernel_endpoints() {
        assert!((kernel_scalar(1.0, -2.0, 1.0).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        let t = 1e-10;
        let k = kernel_scalar(0.5, -3.0, t).unwrap();
        let lead = t.powf(-0.5) / gamma(0.5);
        assert!((k / lead - 1.0).abs() < 1e-4);
        assert!(matches!(
            kernel_scalar(0.5, -1.0, 0.0),
            Err(Error::Domain(_))
        ));
        let a = Mat::from_rows(&[[-1.0]]).unwrap();
        assert!(matches!(ml_kernel(0.7, &a, 0.0), Err(Error::Domain(_))));
    }
}
