//! Stability-sector classification of spectra and scaled block
//! diagonalization.
//!
//! An eigenvalue `λ ≠ 0` lies in the stable sector of order `α` when
//! `|arg λ| > απ/2`; the margin `|arg λ| - απ/2` is reported for every
//! eigenvalue so callers can see how close to the boundary they are.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{bail, Error, Result};
use crate::linalg::{condition_number, sort_eigenvalues, sylvester_triangular, CMat, Mat, Schur};
use crate::ml::CLUSTER_TOL;

pub const DEFAULT_TOL_ARG: f64 = 1e-9;

/// Condition-number limit for the change of basis in
/// [`scaled_block_transform`].
pub const CONDITION_LIMIT: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum EigenClass {
    Stable,
    Unstable,
    Critical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Overall {
    Stable,
    Unstable,
    Critical,
    /// Some eigenvalues stable, some critical, none unstable.
    Mixed,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EigenVerdict {
    pub eigenvalue: Complex64,
    /// `arg λ` in `(-π, π]`.
    pub argument: f64,
    /// `|arg λ| - απ/2`.
    pub margin: f64,
    pub class: EigenClass,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SectorVerdict {
    pub alpha: f64,
    pub tol_arg: f64,
    pub eigenvalues: Vec<EigenVerdict>,
    pub overall: Overall,
}

impl SectorVerdict {
    pub fn is_stable(&self) -> bool {
        self.overall == Overall::Stable
    }

    /// Smallest margin over all eigenvalues (`+∞` for an empty spectrum).
    pub fn min_margin(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|e| e.margin)
            .fold(f64::INFINITY, f64::min)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 2.0) {
        bail!(Domain, "order must lie in (0, 2), got {alpha}");
    }
    Ok(())
}

/// Classifies given eigenvalues against the sector of order `alpha`.
pub fn classify_eigenvalues(
    alpha: f64,
    eigenvalues: &[Complex64],
    tol_arg: f64,
) -> Result<SectorVerdict> {
    check_alpha(alpha)?;
    let mut ev = eigenvalues.to_vec();
    sort_eigenvalues(&mut ev);
    let half = alpha * PI / 2.0;
    let eigenvalues: Vec<EigenVerdict> = ev
        .into_iter()
        .map(|l| {
            let argument = l.im.atan2(l.re);
            let margin = argument.abs() - half;
            let class = if l.norm() == 0.0 {
                EigenClass::Critical
            } else if margin > tol_arg {
                EigenClass::Stable
            } else if margin < -tol_arg {
                EigenClass::Unstable
            } else {
                EigenClass::Critical
            };
            EigenVerdict {
                eigenvalue: l,
                argument,
                margin,
                class,
            }
        })
        .collect();
    let any = |c: EigenClass| eigenvalues.iter().any(|e| e.class == c);
    let overall = if any(EigenClass::Unstable) {
        Overall::Unstable
    } else if !any(EigenClass::Critical) {
        Overall::Stable
    } else if !any(EigenClass::Stable) {
        Overall::Critical
    } else {
        Overall::Mixed
    };
    Ok(SectorVerdict {
        alpha,
        tol_arg,
        eigenvalues,
        overall,
    })
}

/// Sector verdict for the spectrum of `a` at order `alpha_max`.
pub fn sector_classify(alpha_max: f64, a: &Mat, tol_arg: f64) -> Result<SectorVerdict> {
    if !a.is_square() {
        bail!(
            Validation,
            "sector classification needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        );
    }
    let ev = crate::linalg::eigenvalues(a)?;
    classify_eigenvalues(alpha_max, &ev, tol_arg)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Block {
    pub eigenvalue: Complex64,
    pub multiplicity: usize,
    /// True when the block carries a non-zero nilpotent part.
    pub nilpotent: bool,
}

/// `(T P)⁻¹ A (T P) = D + N` with `D` diagonal and `N` strictly upper
/// triangular inside each block, `‖N‖₂ ≤ γ`.
#[derive(Clone, Debug)]
pub struct BlockTransform {
    pub t: CMat,
    pub p: Mat,
    pub gamma: f64,
    pub blocks: Vec<Block>,
    pub d: Vec<Complex64>,
    pub n: CMat,
    /// Condition number of `T` (1-norm).
    pub condition: f64,
}

impl BlockTransform {
    /// `‖(TP)⁻¹ A (TP) - (D + N)‖_max`.
    pub fn residual(&self, a: &Mat) -> Result<f64> {
        let tp = &self.t * &self.p.to_complex();
        let inv = tp.inverse()?;
        let lhs = &(&inv * &a.to_complex()) * &tp;
        let rhs = &CMat::from_diag(&self.d) + &self.n;
        Ok((&lhs - &rhs).max_abs())
    }

    pub fn tp(&self) -> CMat {
        &self.t * &self.p.to_complex()
    }
}

/// Block-diagonalizes `a` by a Schur reduction, clustering of close
/// eigenvalues and Sylvester decoupling, then scales each block with
/// `diag(1, γ, …, γ^{d-1})` so that the nilpotent coupling has norm at most
/// `γ`.
pub fn scaled_block_transform(a: &Mat, gamma: f64) -> Result<BlockTransform> {
    if !a.is_square() {
        bail!(
            Validation,
            "block transform needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        );
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        bail!(Domain, "gamma must be positive, got {gamma}");
    }
    let n = a.rows();
    let ac = a.to_complex();
    let mut schur = Schur::new(&ac)?;
    let ev = schur.eigenvalues();
    let floor = CLUSTER_TOL * 1e-4 * a.norm_fro();
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            let d = (ev[i] - ev[j]).norm();
            if d <= CLUSTER_TOL * ev[i].norm().max(ev[j].norm()) || d <= floor {
                let (keep, drop) = (label[i].min(label[j]), label[i].max(label[j]));
                label
                    .iter_mut()
                    .filter(|l| **l == drop)
                    .for_each(|l| *l = keep);
            }
        }
    }
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
    let mut ranges = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || sorted[i] != sorted[start] {
            ranges.push((start, i));
            start = i;
        }
    }

    // Sylvester decoupling: peel off one leading block at a time.
    let mut tm = schur.t.clone();
    let mut s = CMat::identity(n);
    for &(b0, b1) in &ranges {
        if b1 == n {
            break;
        }
        let t11 = tm.submatrix(b0, b1, b0, b1);
        let t22 = tm.submatrix(b1, n, b1, n);
        let t12 = tm.submatrix(b0, b1, b1, n);
        let y = sylvester_triangular(&t11, &t22, &t12.scale(Complex64::new(-1.0, 0.0)))?;
        // Similarity with [[I, Y], [0, I]] zeroes the (1,2) block.
        let mut e = CMat::identity(n);
        e.set_submatrix(b0, b1, &y);
        let mut einv = CMat::identity(n);
        einv.set_submatrix(b0, b1, &y.scale(Complex64::new(-1.0, 0.0)));
        tm = &(&einv * &tm) * &e;
        for r in b0..b1 {
            for c in b1..n {
                tm[(r, c)] = Complex64::new(0.0, 0.0);
            }
        }
        s = &s * &e;
    }
    let t_basis = &schur.u * &s;
    let condition = condition_number(&t_basis);
    if !(condition <= CONDITION_LIMIT) {
        return Err(Error::Conditioning {
            condition,
            limit: CONDITION_LIMIT,
        });
    }

    // Per-block normalization and γ-scaling.
    let mut c_scale = vec![Complex64::new(1.0, 0.0); n];
    let mut p = vec![1.0; n];
    let mut blocks = Vec::new();
    for &(b0, b1) in &ranges {
        let d = b1 - b0;
        let mut m = CMat::zeros(d, d);
        for r in 0..d {
            for c in r + 1..d {
                m[(r, c)] = tm[(b0 + r, b0 + c)];
            }
        }
        let nilpotent = m.max_abs() > 0.0;
        let bidiagonal = nilpotent
            && (0..d).all(|r| (r + 2..d).all(|c| m[(r, c)] == Complex64::new(0.0, 0.0)))
            && (0..d - 1).all(|r| m[(r, r + 1)] != Complex64::new(0.0, 0.0));
        if bidiagonal {
            // Jordan chain: make the superdiagonal exactly one.
            let mut acc = Complex64::new(1.0, 0.0);
            for r in 0..d {
                c_scale[b0 + r] = acc;
                if r + 1 < d {
                    acc /= m[(r, r + 1)];
                }
            }
        } else if nilpotent {
            let s0 = (1.0 / (m.norm_fro() * gamma.max(1.0).powi(d as i32 - 2))).min(1.0);
            for r in 0..d {
                c_scale[b0 + r] = Complex64::new(s0.powi(r as i32), 0.0);
            }
        }
        for r in 0..d {
            p[b0 + r] = gamma.powi(r as i32);
        }
        let mean: Complex64 = (b0..b1).map(|i| tm[(i, i)]).sum::<Complex64>() / d as f64;
        blocks.push(Block {
            eigenvalue: mean,
            multiplicity: d,
            nilpotent,
        });
    }
    let cmat = CMat::from_diag(&c_scale);
    let t_final = &t_basis * &cmat;
    let pm = Mat::from_diag(&p);
    let tp = &t_final * &pm.to_complex();
    let b = &(&tp.inverse()? * &ac) * &tp;
    let d: Vec<Complex64> = b.diag();
    let mut nmat = CMat::zeros(n, n);
    for &(b0, b1) in &ranges {
        for r in b0..b1 {
            for c in r + 1..b1 {
                nmat[(r, c)] = b[(r, c)];
            }
        }
    }
    Ok(BlockTransform {
        t: t_final,
        p: pm,
        gamma,
        blocks,
        d,
        n: nmat,
        condition,
    })
}

/// Outcome of [`linearized_classify`].
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinearizedVerdict {
    pub jacobian: Mat,
    pub verdict: SectorVerdict,
    pub conclusion: Equilibrium,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Equilibrium {
    LocallyAsymptoticallyStable,
    Unstable,
    /// Critical eigenvalues present and none unstable: linearization decides
    /// nothing.
    Inconclusive,
}

/// Residual tolerance for accepting `x*` as an equilibrium.
pub const EQUILIBRIUM_TOL: f64 = 1e-8;

/// Central-difference Jacobian of `f` at `x`.
pub fn fd_jacobian(f: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64], step: f64) -> Mat {
    let n = x.len();
    let mut jac = Mat::zeros(n, n);
    let mut xp = x.to_vec();
    for j in 0..n {
        let orig = xp[j];
        xp[j] = orig + step;
        let fp = f(&xp);
        xp[j] = orig - step;
        let fm = f(&xp);
        xp[j] = orig;
        for i in 0..n {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * step);
        }
    }
    jac
}

/// Linearizes `f` at `x_star` (analytic Jacobian if given, otherwise central
/// differences with `fd_step`) and classifies the Jacobian.
pub fn linearized_classify(
    f: &dyn Fn(&[f64]) -> Vec<f64>,
    jacobian: Option<&dyn Fn(&[f64]) -> Mat>,
    x_star: &[f64],
    alpha_max: f64,
    fd_step: f64,
    tol_arg: f64,
) -> Result<LinearizedVerdict> {
    let fx = f(x_star);
    if fx.len() != x_star.len() {
        bail!(Validation, "f maps R^{} to R^{}", x_star.len(), fx.len());
    }
    let residual = fx.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(residual <= EQUILIBRIUM_TOL) {
        return Err(Error::NotEquilibrium { residual });
    }
    let jac = match jacobian {
        Some(j) => j(x_star),
        None => {
            if !(fd_step.is_finite() && fd_step > 0.0) {
                bail!(
                    Domain,
                    "finite-difference step must be positive, got {fd_step}"
                );
            }
            fd_jacobian(f, x_star, fd_step)
        }
    };
    let verdict = sector_classify(alpha_max, &jac, tol_arg)?;
    let conclusion = match verdict.overall {
        Overall::Stable => Equilibrium::LocallyAsymptoticallyStable,
        Overall::Unstable => Equilibrium::Unstable,
        _ => Equilibrium::Inconclusive,
    };
    Ok(LinearizedVerdict {
        jacobian: jac,
        verdict,
        conclusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Mat {
        Mat::from_rows(rows).unwrap()
    }

    #[test]
    fn scalar_examples() {
        let v = sector_classify(0.5, &m(&[&[-1.0]]), DEFAULT_TOL_ARG).unwrap();
        assert_eq!(v.overall, Overall::Stable);
        assert!((v.eigenvalues[0].margin - 3.0 * PI / 4.0).abs() < 1e-15);
        let v = sector_classify(1.5, &m(&[&[1.0]]), DEFAULT_TOL_ARG).unwrap();
        assert_eq!(v.overall, Overall::Unstable);
    }

    #[test]
    fn zero_is_critical_and_mixed_verdict() {
        let v = sector_classify(0.5, &m(&[&[0.0, 0.0], &[0.0, -1.0]]), DEFAULT_TOL_ARG).unwrap();
        assert_eq!(v.eigenvalues[1].class, EigenClass::Critical);
        assert_eq!(v.overall, Overall::Mixed);
        let v = sector_classify(0.5, &Mat::zeros(2, 2), DEFAULT_TOL_ARG).unwrap();
        assert_eq!(v.overall, Overall::Critical);
    }

    #[test]
    fn boundary_eigenvalue_is_critical() {
        // λ = ±i at α = 1 sits exactly on the boundary.
        let v = sector_classify(1.0, &m(&[&[0.0, -1.0], &[1.0, 0.0]]), DEFAULT_TOL_ARG).unwrap();
        assert_eq!(v.overall, Overall::Critical);
    }

    #[test]
    fn error_model_two_block() {
        let v = sector_classify(1.0, &m(&[&[-1.0, 2.0], &[-2.0, 0.0]]), DEFAULT_TOL_ARG).unwrap();
        assert_eq!(v.overall, Overall::Stable);
        for e in &v.eigenvalues {
            let l = e.eigenvalue;
            assert!((l * l + l + 4.0).norm() < 1e-12);
        }
    }

    #[test]
    fn block_transform_examples() {
        let bt = scaled_block_transform(&m(&[&[-1.0, 0.0], &[0.0, -3.0]]), 0.3).unwrap();
        assert_eq!(bt.n.max_abs(), 0.0);
        assert!(bt.residual(&m(&[&[-1.0, 0.0], &[0.0, -3.0]])).unwrap() < 1e-15);

        let j = m(&[&[-1.0, 1.0], &[0.0, -1.0]]);
        let bt = scaled_block_transform(&j, 0.1).unwrap();
        assert_eq!(bt.blocks.len(), 1);
        assert!(bt.blocks[0].nilpotent);
        assert!((bt.n[(0, 1)] - Complex64::new(0.1, 0.0)).norm() < 1e-15);
        assert_eq!(bt.n[(1, 0)], Complex64::new(0.0, 0.0));

        let j3 = m(&[&[2.0, 5.0, 0.0], &[0.0, 2.0, 0.5], &[0.0, 0.0, 2.0]]);
        let bt = scaled_block_transform(&j3, 0.2).unwrap();
        assert!((bt.n[(0, 1)].re - 0.2).abs() < 1e-15 && (bt.n[(1, 2)].re - 0.2).abs() < 1e-15);
        assert!(bt.n.norm2() <= 0.2 * (1.0 + 1e-12));
    }

    #[test]
    fn block_transform_general_coupling() {
        let a = m(&[&[-1.0, 4.0, 3.0], &[0.0, -1.0, 7.0], &[0.0, 0.0, -1.0]]);
        for &g in &[0.05, 1.0, 3.0] {
            let bt = scaled_block_transform(&a, g).unwrap();
            assert!(
                bt.n.norm2() <= g * (1.0 + 1e-12),
                "gamma {g}: {}",
                bt.n.norm2()
            );
            assert!(bt.residual(&a).unwrap() < 1e-10);
        }
    }

    #[test]
    fn ill_conditioned_basis_is_rejected() {
        let a = m(&[&[-1.0, 1e2], &[0.0, -1.0 - 1e-3]]);
        assert!(matches!(
            scaled_block_transform(&a, 0.1),
            Err(Error::Conditioning { .. })
        ));
    }

    #[test]
    fn linearization() {
        let stable = |x: &[f64]| vec![-x[0] + x[0].powi(3)];
        let v = linearized_classify(&stable, None, &[0.0], 0.8, 1e-5, DEFAULT_TOL_ARG).unwrap();
        assert_eq!(v.conclusion, Equilibrium::LocallyAsymptoticallyStable);
        let unstable = |x: &[f64]| vec![x[0] - x[0].powi(3)];
        let v = linearized_classify(&unstable, None, &[0.0], 0.8, 1e-5, DEFAULT_TOL_ARG).unwrap();
        assert_eq!(v.conclusion, Equilibrium::Unstable);
        let err =
            linearized_classify(&stable, None, &[0.5], 0.8, 1e-5, DEFAULT_TOL_ARG).unwrap_err();
        assert!(matches!(err, Error::NotEquilibrium { .. }));
    }
}
