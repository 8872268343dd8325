//! Gamma-function helpers on the real line.

use core::f64::consts::PI;

/// Γ(x) for real `x`.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// ln|Γ(x)|.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// 1/Γ(x), entire in `x`: returns exactly zero at the poles `0, -1, -2, …`
/// and stays finite where Γ overflows.
pub fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x == libm::floor(x) {
        return 0.0;
    }
    if x < 0.5 {
        // Reflection: 1/Γ(x) = Γ(1-x) sin(πx) / π.
        let s = sin_pi(x);
        let g = 1.0 - x;
        if g < 170.0 {
            return gamma(g) * s / PI;
        }
        return s / PI * libm::exp(ln_gamma(g));
    }
    if x < 170.0 {
        1.0 / gamma(x)
    } else {
        libm::exp(-ln_gamma(x))
    }
}

/// sin(πx) with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * libm::round(x / 2.0);
    if r == libm::round(r) {
        return 0.0;
    }
    libm::sin(PI * r)
}

/// ln Γ(x) together with the sign of Γ(x).
pub fn ln_gamma_signed(x: f64) -> (f64, f64) {
    let (v, s) = libm::lgamma_r(x);
    (v, if s < 0 { -1.0 } else { 1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn recip_gamma_poles_and_reflection() {
        for k in 0..6 {
            assert_eq!(recip_gamma(-(k as f64)), 0.0);
        }
        // Γ(-0.5) = -2√π
        assert!((recip_gamma(-0.5) + 1.0 / (2.0 * PI.sqrt())).abs() < 1e-15);
        assert!(recip_gamma(171.5) > 0.0 && recip_gamma(171.5) < 1e-305);
        assert!((recip_gamma(3.0) - 0.5).abs() < 1e-16);
    }
}
