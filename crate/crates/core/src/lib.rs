//! Numerical toolkit for Caputo fractional systems of order `0 < α < 2`.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the numerical
//! core:
//!
//! * [`ml`]: scalar and matrix Mittag-Leffler functions `E_{α,β}` and the
//!   convolution kernel `t^{α-1} E_{α,α}(t^α A)`.
//! * [`spectral`]: stability-sector classification and scaled block
//!   transforms.
//! * [`certificates`]: `C(α, A)`, the `q` contraction estimate, small-gain,
//!   comparison and persistent-excitation checks.
//! * [`solver`]: fractional Adams–Bashforth–Moulton integration and the
//!   Lyapunov–Perron fixed-point oracle.
//! * [`adaptive`]: fractional adaptive error models of type I and II.
//!
//! File formats, configuration and the command-line front end live in the
//! companion `fracdyn` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod adaptive;
pub mod certificates;
mod error;
pub mod linalg;
pub mod ml;
pub mod quad;
pub mod signal;
pub mod solver;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::{CMat, Mat};
pub use num_complex::Complex64;
