//! Extended-precision Mittag-Leffler series for golden values.

use rug::ops::Pow;
use rug::Float;

/// `E_{α,β}(z) = Σ z^k / Γ(αk + β)`, with working precision grown to absorb
/// the cancellation on the negative axis (terms peak near `exp(|z|^{1/α})`).
pub fn ml_series(alpha: f64, beta: f64, z: f64) -> f64 {
    let prec = 256 + (3.0 * z.abs().powf(1.0 / alpha) / std::f64::consts::LN_2) as u32;
    let a = Float::with_val(prec, alpha);
    let b = Float::with_val(prec, beta);
    let zf = Float::with_val(prec, z);
    let mut sum = Float::with_val(prec, 0);
    for k in 0u32..100_000 {
        let arg = Float::with_val(prec, &a * k) + &b;
        if arg.is_zero() || (arg.is_integer() && arg < 0) {
            continue;
        }
        let term = Float::with_val(prec, (&zf).pow(k)) / arg.gamma();
        let mag = Float::with_val(prec, term.abs_ref());
        sum += &term;
        if k > 10 && mag < Float::with_val(prec, sum.abs_ref()) * 1e-40 {
            break;
        }
    }
    sum.to_f64()
}
