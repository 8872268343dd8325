use alloc::string::String;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested accuracy could not be reached; `bound` is the best
    /// error (or magnitude) estimate that was achieved.
    #[error("accuracy error: {message} (best bound {bound:e})")]
    Accuracy { message: String, bound: f64 },
    /// An iterative linear-algebra or arithmetic routine failed.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// No sufficiently well-conditioned change of basis exists.
    #[error("conditioning error: condition number {condition:e} exceeds {limit:e}; simulate the system directly instead")]
    Conditioning { condition: f64, limit: f64 },
    /// A quantity that is only finite for sector-stable matrices was requested
    /// for a matrix outside the stable sector.
    #[error("divergence: {0}")]
    Divergence(String),
    /// The supplied point is not an equilibrium.
    #[error("not an equilibrium: |f(x*)| = {residual:e}")]
    NotEquilibrium { residual: f64 },
    /// The Lyapunov–Perron iteration did not contract.
    #[error("no contraction: observed ratio {mu} >= 1 after {iterations} iterations")]
    NoContraction { mu: f64, iterations: usize },
    /// Inconsistent dimensions or invalid model data.
    #[error("validation error: {0}")]
    Validation(String),
    /// Invalid call (for example an empty candidate list).
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

macro_rules! bail {
    ($variant:ident, $($arg:tt)*) => {
        return Err($crate::Error::$variant(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
