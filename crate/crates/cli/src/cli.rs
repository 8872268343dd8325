use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracdyn_core::certificates::MatrixNorm;

/// Fractional-order systems toolkit: Mittag-Leffler functions, robustness
/// certificates, simulation and adaptive error models.
#[derive(Debug, Parser)]
#[command(name = "fracdyn", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate E_{alpha,beta}(z) or E_{alpha,beta}(t^alpha A).
    Ml(MlArgs),
    /// Compute the certificate chain for a system file.
    Certify(CertifyArgs),
    /// Integrate a system file.
    Simulate(SimulateArgs),
    /// Run adaptive error-model scenarios.
    Adapt(AdaptArgs),
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output directory.
    #[arg(long, env = "FRACDYN_OUT", default_value = "fracdyn-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MlArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub beta: f64,
    /// Scalar argument, `re` or `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, conflicts_with = "matrix_file", required_unless_present = "matrix_file")]
    pub z: Option<fracdyn_core::Complex64>,
    /// Plain-text square matrix, one row per line.
    #[arg(long)]
    pub matrix_file: Option<PathBuf>,
    /// Time scale of the matrix argument `t^alpha A`.
    #[arg(
        long,
        default_value_t = 1.0,
        allow_negative_numbers = true,
        requires = "matrix_file"
    )]
    pub t: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    Spectral,
    MaxRowSum,
}

impl From<NormArg> for MatrixNorm {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Spectral => MatrixNorm::Spectral,
            NormArg::MaxRowSum => MatrixNorm::MaxRowSum,
        }
    }
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Number of q grid points.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, value_enum)]
    pub norm: Option<NormArg>,
    #[arg(long)]
    pub quad_tol: Option<f64>,
    /// Also measure the Lyapunov-Perron contraction with this many intervals.
    #[arg(long)]
    pub lp_intervals: Option<usize>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Oracle {
    /// Lyapunov-Perron fixed-point iteration.
    Lp,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Cross-check against an independent solver.
    #[arg(long, value_enum)]
    pub oracle: Option<Oracle>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct AdaptArgs {
    #[arg(long, conflicts_with = "batch", required_unless_present = "batch")]
    pub scenario: Option<PathBuf>,
    /// Run every `*.toml` scenario in a directory.
    #[arg(long)]
    pub batch: Option<PathBuf>,
    /// Worker threads for `--batch` (default: available parallelism).
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub out: OutArgs,
}

fn parse_complex(s: &str) -> Result<fracdyn_core::Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let p = |x: &str| x.parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    match parts.as_slice() {
        [re] => Ok(fracdyn_core::Complex64::new(p(re)?, 0.0)),
        [re, im] => Ok(fracdyn_core::Complex64::new(p(re)?, p(im)?)),
        _ => Err(format!("expected `re` or `re,im`, got `{s}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn complex_arguments() {
        assert_eq!(
            parse_complex("1.5").unwrap(),
            fracdyn_core::Complex64::new(1.5, 0.0)
        );
        assert_eq!(
            parse_complex("-1, 2").unwrap(),
            fracdyn_core::Complex64::new(-1.0, 2.0)
        );
        assert!(parse_complex("1,2,3").is_err());
    }
}
