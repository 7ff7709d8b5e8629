//! Log-gamma and digamma on the positive real axis.
//!
//! Both functions shift the argument above [`ASYMPTOTIC_THRESHOLD`] with the
//! upward recurrence and then evaluate the Stirling / de Moivre asymptotic
//! series. Coefficients come from the Bernoulli numbers B2..B14, so the
//! truncation error at the threshold is below 1e-16.

use crate::error::{Error, Result};

const ASYMPTOTIC_THRESHOLD: f64 = 10.0;

/// 0.5 * ln(2 pi)
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// B_{2k} / (2k (2k-1)) for k = 1..7, multiplying y^{-(2k-1)}.
const STIRLING: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
];

/// B_{2k} / (2k) for k = 1..7, multiplying y^{-2k}.
const DIGAMMA_SERIES: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
];

fn check_domain(function: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            function,
            value: x,
            expected: "x > 0",
        })
    }
}

/// Horner evaluation of `sum_k coeffs[k] * w^k` for `w = 1/y^2`.
fn series_in_inverse_square(coeffs: &[f64], y: f64) -> f64 {
    let w = 1.0 / (y * y);
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * w + c)
}

/// Natural logarithm of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_domain("log_gamma", x)?;
    let mut y = x;
    let mut product = 1.0;
    while y < ASYMPTOTIC_THRESHOLD {
        product *= y;
        y += 1.0;
    }
    let stirling =
        (y - 0.5) * y.ln() - y + HALF_LN_TWO_PI + series_in_inverse_square(&STIRLING, y) / y;
    Ok(stirling - product.ln())
}

/// Digamma function psi(x) = d/dx ln Gamma(x) for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    check_domain("digamma", x)?;
    let mut y = x;
    let mut shift = 0.0;
    while y < ASYMPTOTIC_THRESHOLD {
        shift += 1.0 / y;
        y += 1.0;
    }
    let w = 1.0 / (y * y);
    let asymptotic = y.ln() - 0.5 / y - w * series_in_inverse_square(&DIGAMMA_SERIES, y);
    Ok(asymptotic - shift)
}

/// ln(n!) through [`log_gamma`].
pub(crate) fn ln_factorial(n: usize) -> f64 {
    log_gamma(n as f64 + 1.0).expect("n + 1 is positive")
}

/// ln C(n, k) through [`log_gamma`].
pub(crate) fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}
