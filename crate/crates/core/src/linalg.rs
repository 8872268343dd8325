//! Small dense linear algebra over `f64` and `Complex64`.
//!
//! The matrices handled here are state-space sized (a handful of rows), so
//! everything is row-major `Vec` storage with straightforward `O(n^3)`
//! algorithms: Householder–Hessenberg reduction followed by shifted QR for the
//! complex Schur form, LU with partial pivoting, and cyclic Jacobi for
//! symmetric eigenproblems.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{bail, Error, Result};

/// Field element usable as a matrix entry.
pub trait Scalar:
    Copy
    + PartialEq
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn modulus(self) -> f64;
    fn conj(self) -> Self;
    fn is_finite(self) -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn conj(self) -> Self {
        self
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Dense row-major matrix. Serializes as a list of rows.
#[derive(Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(into = "Vec<Vec<T>>", try_from = "Vec<Vec<T>>")
)]
#[cfg_attr(
    feature = "serde",
    serde(bound(
        serialize = "T: Scalar + serde::Serialize",
        deserialize = "T: Scalar + serde::Deserialize<'de>"
    ))
)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> From<Matrix<T>> for Vec<Vec<T>> {
    fn from(m: Matrix<T>) -> Self {
        m.data
            .chunks(m.cols.max(1))
            .take(m.rows)
            .map(<[T]>::to_vec)
            .collect()
    }
}

impl<T: Scalar> TryFrom<Vec<Vec<T>>> for Matrix<T> {
    type Error = Error;

    fn try_from(rows: Vec<Vec<T>>) -> Result<Self> {
        Matrix::from_rows(&rows)
    }
}

pub type Mat = Matrix<f64>;
pub type CMat = Matrix<Complex64>;

impl<T: Scalar> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        write!(f, "]")
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            bail!(
                Validation,
                "matrix data has {} entries, expected {}x{}",
                data.len(),
                rows,
                cols
            );
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                bail!(
                    Validation,
                    "row {} has {} entries, expected {}",
                    i,
                    r.len(),
                    cols
                );
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_diag(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn column_vector(v: &[T]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn scalar(v: T) -> Self {
        Self {
            rows: 1,
            cols: 1,
            data: vec![v],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn diag(&self) -> Vec<T> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].conj();
            }
        }
        t
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|x| x * s)
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols, "dimension mismatch in mul_vec");
        let mut out = vec![T::zero(); self.rows];
        self.mul_vec_into(v, &mut out);
        out
    }

    pub fn mul_vec_into(&self, v: &[T], out: &mut [T]) {
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = T::zero();
            for (a, &x) in self.row(r).iter().zip(v) {
                acc += *a * x;
            }
            *o = acc;
        }
    }

    pub fn norm_fro(&self) -> f64 {
        self.data
            .iter()
            .map(|x| {
                let m = x.modulus();
                m * m
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Maximum absolute row sum (the operator norm induced by `l∞`).
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|x| x.modulus()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.modulus()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// True when every entry strictly below the diagonal is exactly zero.
    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|r| (0..r.min(self.cols)).all(|c| self[(r, c)] == T::zero()))
    }

    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut s = Self::zeros(r1 - r0, c1 - c0);
        for r in r0..r1 {
            for c in c0..c1 {
                s[(r - r0, c - c0)] = self[(r, c)];
            }
        }
        s
    }

    pub fn set_submatrix(&mut self, r0: usize, c0: usize, block: &Self) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self[(r0 + r, c0 + c)] = block[(r, c)];
            }
        }
    }

    /// Solves `self * X = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        let lu = Lu::new(self)?;
        Ok(lu.solve(rhs))
    }

    pub fn inverse(&self) -> Result<Self> {
        self.solve(&Self::identity(self.rows))
    }
}

impl Mat {
    pub fn to_complex(&self) -> CMat {
        self.map(|x| Complex64::new(x, 0.0))
    }

    /// Symmetric part `(A + Aᵀ)/2`.
    pub fn sym_part(&self) -> Mat {
        let t = self.transpose();
        (self + &t).scale(0.5)
    }

    /// Operator 2-norm (largest singular value).
    pub fn norm2(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        let gram = &self.transpose() * self;
        sym_eigenvalues(&gram)
            .last()
            .copied()
            .unwrap_or(0.0)
            .max(0.0)
            .sqrt()
    }
}

impl CMat {
    pub fn re(&self) -> Mat {
        self.map(|z| z.re)
    }

    pub fn max_abs_im(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Operator 2-norm, computed through the real symmetric embedding of
    /// `AᴴA`.
    pub fn norm2(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        let h = &self.adjoint() * self;
        let n = h.rows;
        let mut emb = Mat::zeros(2 * n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                let z = h[(r, c)];
                emb[(r, c)] = z.re;
                emb[(r + n, c + n)] = z.re;
                emb[(r, c + n)] = -z.im;
                emb[(r + n, c)] = z.im;
            }
        }
        sym_eigenvalues(&emb)
            .last()
            .copied()
            .unwrap_or(0.0)
            .max(0.0)
            .sqrt()
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: Self) -> Matrix<T> {
        assert_eq!(self.shape(), rhs.shape(), "dimension mismatch in add");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: Self) -> Matrix<T> {
        assert_eq!(self.shape(), rhs.shape(), "dimension mismatch in sub");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: Self) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in mul");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == T::zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    out.data[r * rhs.cols + c] += a * rhs.data[k * rhs.cols + c];
                }
            }
        }
        out
    }
}

impl<T: Scalar> Add for Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: Self) -> Matrix<T> {
        &self + &rhs
    }
}

impl<T: Scalar> Sub for Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: Self) -> Matrix<T> {
        &self - &rhs
    }
}

impl<T: Scalar> Mul for Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: Self) -> Matrix<T> {
        &self * &rhs
    }
}

/// LU factorisation with partial pivoting.
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    pub fn new(a: &Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            bail!(
                Validation,
                "LU of a non-square {}x{} matrix",
                a.rows,
                a.cols
            );
        }
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|r| (r, lu[(r, k)].modulus()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax <= scale * 1e-300 || pmax == 0.0 {
                bail!(Numeric, "singular matrix in LU (pivot {} vanishes)", k);
            }
            if p != k {
                for c in 0..n {
                    lu.data.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
            }
            let piv = lu[(k, k)];
            for r in k + 1..n {
                let l = lu[(r, k)] / piv;
                lu[(r, k)] = l;
                if l == T::zero() {
                    continue;
                }
                for c in k + 1..n {
                    let u = lu[(k, c)];
                    lu[(r, c)] -= l * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, rhs: &Matrix<T>) -> Matrix<T> {
        let n = self.lu.rows;
        assert_eq!(rhs.rows, n, "dimension mismatch in LU solve");
        let m = rhs.cols;
        let mut x = Matrix::zeros(n, m);
        for (i, &p) in self.perm.iter().enumerate() {
            for c in 0..m {
                x[(i, c)] = rhs[(p, c)];
            }
        }
        for c in 0..m {
            for i in 0..n {
                let mut acc = x[(i, c)];
                for k in 0..i {
                    acc -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = acc;
            }
            for i in (0..n).rev() {
                let mut acc = x[(i, c)];
                for k in i + 1..n {
                    acc -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = acc / self.lu[(i, i)];
            }
        }
        x
    }
}

/// 1-norm condition number estimate `‖A‖₁‖A⁻¹‖₁` computed from the explicit
/// inverse (fine at these sizes). Singular matrices report `f64::INFINITY`.
pub fn condition_number<T: Scalar>(a: &Matrix<T>) -> f64 {
    match a.inverse() {
        Ok(inv) => a.transpose().norm_inf() * inv.transpose().norm_inf(),
        Err(_) => f64::INFINITY,
    }
}

/// Eigenvalues of a real symmetric matrix in ascending order (cyclic Jacobi).
pub fn sym_eigenvalues(a: &Mat) -> Vec<f64> {
    let n = a.rows;
    let mut m = a.sym_part();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| m[(r, c)] * m[(r, c)])
            .sum();
        let total = m.norm_fro();
        if off.sqrt() <= 1e-17 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev = m.diag();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    ev
}

/// Complex Schur decomposition `A = U T Uᴴ` with `U` unitary and `T` upper
/// triangular.
#[derive(Clone, Debug)]
pub struct Schur {
    pub u: CMat,
    pub t: CMat,
}

impl Schur {
    pub fn new(a: &CMat) -> Result<Self> {
        if !a.is_square() {
            bail!(
                Validation,
                "Schur form of a non-square {}x{} matrix",
                a.rows,
                a.cols
            );
        }
        if !a.is_finite() {
            bail!(Domain, "Schur form of a matrix with non-finite entries");
        }
        let n = a.rows;
        let mut h = a.clone();
        let mut u = CMat::identity(n);
        hessenberg(&mut h, &mut u);
        shifted_qr(&mut h, &mut u)?;
        for r in 1..n {
            for c in 0..r {
                h[(r, c)] = Complex64::new(0.0, 0.0);
            }
        }
        Ok(Self { u, t: h })
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.t.diag()
    }

    /// Swaps the adjacent diagonal entries `k` and `k+1` of `T` with a unitary
    /// rotation, keeping `A = U T Uᴴ`.
    pub fn swap(&mut self, k: usize) {
        let n = self.t.rows;
        let a = self.t[(k, k)];
        let c = self.t[(k + 1, k + 1)];
        let b = self.t[(k, k + 1)];
        let d = c - a;
        let r = (b.norm_sqr() + d.norm_sqr()).sqrt();
        if r == 0.0 {
            return;
        }
        let x1 = b / r;
        let x2 = d / r;
        // Rows: T <- Gᴴ T.
        for col in 0..n {
            let p = self.t[(k, col)];
            let q = self.t[(k + 1, col)];
            self.t[(k, col)] = x1.conj() * p + x2.conj() * q;
            self.t[(k + 1, col)] = -x2 * p + x1 * q;
        }
        // Columns: T <- T G, U <- U G.
        for m in [&mut self.t, &mut self.u] {
            for row in 0..n {
                let p = m[(row, k)];
                let q = m[(row, k + 1)];
                m[(row, k)] = x1 * p + x2 * q;
                m[(row, k + 1)] = -x2.conj() * p + x1.conj() * q;
            }
        }
        self.t[(k + 1, k)] = Complex64::new(0.0, 0.0);
        self.t[(k, k)] = c;
        self.t[(k + 1, k + 1)] = a;
    }

    /// Reorders `T` so that the diagonal entries appear grouped by
    /// `labels` (stable with respect to the current order within a group).
    /// `labels[i]` is the group of the current diagonal entry `i`; the
    /// permuted labels are returned.
    pub fn group_by(&mut self, labels: &[usize]) -> Vec<usize> {
        let mut labels = labels.to_vec();
        let n = labels.len();
        // Bubble sort with adjacent unitary swaps.
        for pass in 0..n {
            let mut swapped = false;
            for k in 0..n.saturating_sub(1 + pass) {
                if labels[k] > labels[k + 1] {
                    self.swap(k);
                    labels.swap(k, k + 1);
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
        labels
    }
}

fn hessenberg(h: &mut CMat, u: &mut CMat) {
    let n = h.rows;
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let xnorm = (k + 1..n).map(|r| h[(r, k)].norm_sqr()).sum::<f64>().sqrt();
        let tail = (k + 2..n).map(|r| h[(r, k)].norm_sqr()).sum::<f64>();
        if xnorm == 0.0 || tail == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        let mut v: Vec<Complex64> = (k + 1..n).map(|r| h[(r, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H <- P H with P = I - 2 v vᴴ acting on rows k+1..n.
        for c in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for (i, vi) in v.iter().enumerate() {
                s += vi.conj() * h[(k + 1 + i, c)];
            }
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, c)] -= *vi * s * 2.0;
            }
        }
        // H <- H P and U <- U P on columns k+1..n.
        for m in [&mut *h, &mut *u] {
            for r in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for (i, vi) in v.iter().enumerate() {
                    s += m[(r, k + 1 + i)] * *vi;
                }
                for (i, vi) in v.iter().enumerate() {
                    m[(r, k + 1 + i)] -= s * vi.conj() * 2.0;
                }
            }
        }
        for r in k + 2..n {
            h[(r, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

fn givens(x: Complex64, y: Complex64) -> (Complex64, Complex64) {
    let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
    if r == 0.0 {
        (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    } else {
        (x / r, y / r)
    }
}

fn shifted_qr(h: &mut CMat, u: &mut CMat) -> Result<()> {
    let n = h.rows;
    if n < 2 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let s = if s == 0.0 { h.max_abs() } else { s };
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 60 * n {
            bail!(
                Numeric,
                "QR iteration failed to converge for the Schur form"
            );
        }
        let shift = if iter % 11 == 10 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + Complex64::new(h[(hi, hi - 1)].norm(), 0.0) * 0.75
        } else {
            let a = h[(hi - 1, hi - 1)];
            let b = h[(hi - 1, hi)];
            let c = h[(hi, hi - 1)];
            let d = h[(hi, hi)];
            let half = (a - d) * 0.5;
            let disc = (half * half + b * c).sqrt();
            let m1 = (a + d) * 0.5 + disc;
            let m2 = (a + d) * 0.5 - disc;
            if (m1 - d).norm() < (m2 - d).norm() {
                m1
            } else {
                m2
            }
        };
        let mut x = h[(l, l)] - shift;
        let mut y = h[(l + 1, l)];
        for k in l..hi {
            let (cs, sn) = givens(x, y);
            let col0 = if k > l { k - 1 } else { l };
            for col in col0..n {
                let p = h[(k, col)];
                let q = h[(k + 1, col)];
                h[(k, col)] = cs.conj() * p + sn.conj() * q;
                h[(k + 1, col)] = -sn * p + cs * q;
            }
            let row1 = (k + 2).min(hi);
            for row in 0..=row1 {
                let p = h[(row, k)];
                let q = h[(row, k + 1)];
                h[(row, k)] = p * cs + q * sn;
                h[(row, k + 1)] = -p * sn.conj() + q * cs.conj();
            }
            for row in 0..n {
                let p = u[(row, k)];
                let q = u[(row, k + 1)];
                u[(row, k)] = p * cs + q * sn;
                u[(row, k + 1)] = -p * sn.conj() + q * cs.conj();
            }
            if k + 1 < hi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }
    Ok(())
}

/// Eigenvalues of a real square matrix, sorted by real part then imaginary
/// part.
pub fn eigenvalues(a: &Mat) -> Result<Vec<Complex64>> {
    let schur = Schur::new(&a.to_complex())?;
    let mut ev = schur.eigenvalues();
    sort_eigenvalues(&mut ev);
    Ok(ev)
}

pub fn sort_eigenvalues(ev: &mut [Complex64]) {
    ev.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(
                a.im.partial_cmp(&b.im)
                    .unwrap_or(core::cmp::Ordering::Equal),
            )
    });
}

/// Solves the triangular Sylvester equation `A X - X B = C` where `A` and `B`
/// are upper triangular with disjoint spectra.
pub fn sylvester_triangular(a: &CMat, b: &CMat, c: &CMat) -> Result<CMat> {
    let p = a.rows;
    let q = b.rows;
    let mut x = CMat::zeros(p, q);
    for col in 0..q {
        let mut rhs: Vec<Complex64> = (0..p).map(|r| c[(r, col)]).collect();
        for l in 0..col {
            let blc = b[(l, col)];
            if blc == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (r, v) in rhs.iter_mut().enumerate() {
                *v += x[(r, l)] * blc;
            }
        }
        let shift = b[(col, col)];
        for r in (0..p).rev() {
            let mut acc = rhs[r];
            for k in r + 1..p {
                acc -= a[(r, k)] * x[(k, col)];
            }
            let d = a[(r, r)] - shift;
            if d.norm() == 0.0 {
                return Err(Error::Numeric(alloc::format!(
                    "Sylvester equation is singular: shared eigenvalue {}",
                    shift
                )));
            }
            x[(r, col)] = acc / d;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reconstruct(s: &Schur) -> CMat {
        &(&s.u * &s.t) * &s.u.adjoint()
    }

    #[test]
    fn schur_reconstructs_random_matrices() {
        let a = Mat::from_rows(&[
            [4.0, -2.0, 1.0, 0.5],
            [3.0, 6.0, -4.0, 2.0],
            [2.0, 1.0, 8.0, -1.0],
            [-1.0, 0.3, 2.0, -3.0],
        ])
        .unwrap();
        let s = Schur::new(&a.to_complex()).unwrap();
        let err = (&reconstruct(&s) - &a.to_complex()).max_abs();
        assert!(err < 1e-12, "reconstruction error {err}");
        let uu = &s.u.adjoint() * &s.u;
        assert!((&uu - &CMat::identity(4)).max_abs() < 1e-13);
        // trace is preserved
        let tr: Complex64 = s.eigenvalues().iter().sum();
        assert!((tr - c(15.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn schur_of_rotation_has_imaginary_pair() {
        let a = Mat::from_rows(&[[0.0, -2.0], [2.0, 0.0]]).unwrap();
        let ev = eigenvalues(&a).unwrap();
        assert!((ev[0] - c(0.0, -2.0)).norm() < 1e-14);
        assert!((ev[1] - c(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn triangular_input_is_left_untouched() {
        let a = Mat::from_rows(&[[-1.0, 1.0], [0.0, -1.0]])
            .unwrap()
            .to_complex();
        let s = Schur::new(&a).unwrap();
        assert_eq!(s.t, a);
        assert_eq!(s.u, CMat::identity(2));
    }

    #[test]
    fn swap_and_group_preserve_similarity() {
        let a =
            Mat::from_rows(&[[1.0, 2.0, 3.0], [0.0, 5.0, 4.0], [0.0, 0.0, 1.0 + 1e-9]]).unwrap();
        let mut s = Schur::new(&a.to_complex()).unwrap();
        let labels = s.group_by(&[0, 1, 0]);
        assert_eq!(labels, vec![0, 0, 1]);
        assert!((s.t[(2, 2)] - c(5.0, 0.0)).norm() < 1e-14);
        let err = (&reconstruct(&s) - &a.to_complex()).max_abs();
        assert!(err < 1e-13, "{err}");
    }

    #[test]
    fn lu_solves_and_detects_singularity() {
        let a = Mat::from_rows(&[[0.0, 2.0], [1.0, 1.0]]).unwrap();
        let inv = a.inverse().unwrap();
        assert!((&(&a * &inv) - &Mat::identity(2)).max_abs() < 1e-15);
        let s = Mat::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert!(matches!(s.inverse(), Err(Error::Numeric(_))));
    }

    #[test]
    fn symmetric_eigenvalues_and_norms() {
        let a = Mat::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let ev = sym_eigenvalues(&a);
        assert!((ev[0] - 1.0).abs() < 1e-15 && (ev[1] - 3.0).abs() < 1e-15);
        let b = Mat::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!((b.norm2() - 1.0).abs() < 1e-15);
        assert!((b.norm_fro() - 2f64.sqrt()).abs() < 1e-15);
        let z = CMat::from_rows(&[[c(0.0, 3.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 1.0)]]).unwrap();
        assert!((z.norm2() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn sylvester_solution_satisfies_equation() {
        let a = CMat::from_rows(&[[c(1.0, 0.0), c(2.0, 0.0)], [c(0.0, 0.0), c(3.0, 1.0)]]).unwrap();
        let b =
            CMat::from_rows(&[[c(-1.0, 0.0), c(0.5, 0.0)], [c(0.0, 0.0), c(-2.0, 0.0)]]).unwrap();
        let cc =
            CMat::from_rows(&[[c(1.0, 0.0), c(0.0, 1.0)], [c(2.0, 0.0), c(1.0, 0.0)]]).unwrap();
        let x = sylvester_triangular(&a, &b, &cc).unwrap();
        let res = &(&(&a * &x) - &(&x * &b)) - &cc;
        assert!(res.max_abs() < 1e-14);
    }
}
