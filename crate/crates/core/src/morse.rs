//! Bound-state spectrum of a single Morse oscillator.
//!
//! Lengths are dimensionless (in units of the inverse Morse width) and the
//! anharmonicity `lambda` fixes both the depth and the number of bound
//! states. The internal parameter `N = lambda - 1/2` appears in every closed
//! form; the state `n` has Laguerre index `2(N - n)`.
//!
//! Position elements diverge for the highest state as `lambda` approaches a
//! half-integer from above. They stay finite for any positive distance, but
//! below `lambda - (n + 1/2) ~ 1e-4` the bath couplings become large enough
//! that long-time results deserve scrutiny.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::specfun::{digamma, ln_binomial, ln_factorial, log_gamma};

/// Tolerance for recognising `lambda + 1/2` as an integer.
pub const HALF_INTEGER_TOLERANCE: f64 = 1e-9;

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.5 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            function: "morse",
            value: lambda,
            expected: "lambda > 1/2",
        })
    }
}

/// Harmonic frequency and anharmonicity of one oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorseParams {
    pub omega: f64,
    pub lambda: f64,
}

impl MorseParams {
    pub fn new(omega: f64, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "omega",
                reason: format!("must be positive, got {omega}"),
            });
        }
        Ok(Self { omega, lambda })
    }

    /// Well depth `D = omega * lambda / 2`.
    pub fn depth(&self) -> f64 {
        0.5 * self.omega * self.lambda
    }

    /// Inverse width `alpha = sqrt(omega / lambda)` (unit mass, hbar = 1).
    pub fn width(&self) -> f64 {
        (self.omega / self.lambda).sqrt()
    }
}

/// Number of bound states: the integer part of `lambda + 1/2`, or
/// `lambda - 1/2` when `lambda + 1/2` is itself an integer.
pub fn bound_state_count(lambda: f64) -> Result<usize> {
    check_lambda(lambda)?;
    let shifted = lambda + 0.5;
    let nearest = shifted.round();
    let count = if (shifted - nearest).abs() < HALF_INTEGER_TOLERANCE {
        nearest - 1.0
    } else {
        shifted.floor()
    };
    Ok(count as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionKind {
    /// All bound states strongly bound (`lambda` at or just below `n + 1/2`).
    StronglyBound,
    /// A weakly bound top state has just appeared (`lambda` just above `n + 1/2`).
    WeaklyBound,
}

/// Decomposition `lambda = n + 1/2 + epsilon` around the nearest half-integer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionTag {
    pub n: usize,
    pub epsilon: f64,
    pub kind: RegionKind,
}

impl RegionTag {
    /// Index of the weakly bound state, if there is one.
    pub fn weakly_bound_index(&self) -> Option<usize> {
        match self.kind {
            RegionKind::WeaklyBound => Some(self.n),
            RegionKind::StronglyBound => None,
        }
    }
}

pub fn region_classify(lambda: f64) -> Result<RegionTag> {
    check_lambda(lambda)?;
    let n = (lambda - 0.5).round();
    let epsilon = lambda - 0.5 - n;
    let kind = if epsilon > HALF_INTEGER_TOLERANCE {
        RegionKind::WeaklyBound
    } else {
        RegionKind::StronglyBound
    };
    Ok(RegionTag {
        n: n as usize,
        epsilon,
        kind,
    })
}

/// Bound-state energies `E_n = -(omega / 2 lambda) (lambda - n - 1/2)^2`,
/// ascending and all negative.
pub fn bound_energies(params: &MorseParams) -> Vec<f64> {
    let count = bound_state_count(params.lambda).expect("validated lambda");
    let scale = params.omega / (2.0 * params.lambda);
    (0..count)
        .map(|n| {
            let gap = params.lambda - (n as f64 + 0.5);
            -scale * gap * gap
        })
        .collect()
}

/// Matrix of the dimensionless position `<n|x|m>` in the bound-state basis.
///
/// Just above a half integer, `lambda = n + 1/2 + eps`, the diagonal entry of
/// the weakly bound top state grows like `1/(2 eps)`. It stays finite for any
/// `eps > 0`, but below `eps ~ 1e-4` it dominates every other scale.
pub fn x_matrix(lambda: f64) -> Result<DMatrix<f64>> {
    let count = bound_state_count(lambda)?;
    let big_n = lambda - 0.5;
    let ln_width = (2.0 * big_n + 1.0).ln();

    let mut x = DMatrix::zeros(count, count);
    for n in 0..count {
        let nf = n as f64;
        let u = 2.0 * big_n - 2.0 * nf;
        let v = 2.0 * big_n - nf + 1.0;
        x[(n, n)] = ln_width - digamma(u)? - digamma(u + 1.0)? + digamma(v)?;
    }
    for n in 0..count {
        for m in (n + 1)..count {
            let value = off_diagonal_element(big_n, n, m)?;
            x[(n, m)] = value;
            x[(m, n)] = value;
        }
    }
    Ok(x)
}

/// `<n|x|m>` for `m > n`.
fn off_diagonal_element(big_n: f64, n: usize, m: usize) -> Result<f64> {
    let (nf, mf) = (n as f64, m as f64);
    let u = 2.0 * big_n - nf - mf;
    let gap_n = big_n - nf;
    let gap_m = big_n - mf;
    if !(u > 0.0 && gap_m > 0.0) {
        return Err(Error::Domain {
            function: "x_matrix",
            value: gap_m,
            expected: "N - m > 0 for every bound state",
        });
    }
    let ln_ratio = ln_factorial(m) + gap_n.ln() + gap_m.ln() + log_gamma(2.0 * big_n - mf + 1.0)?
        - ln_factorial(n)
        - log_gamma(2.0 * big_n - nf + 1.0)?;
    let sign = if (m - n).is_multiple_of(2) { -1.0 } else { 1.0 };
    Ok(sign * 2.0 / (u * (mf - nf)) * (0.5 * ln_ratio).exp())
}

/// Matrix of `b + b^dagger` in the bound-state basis, `sqrt(2 lambda) * x`.
pub fn ladder_matrix(lambda: f64) -> Result<DMatrix<f64>> {
    Ok(x_matrix(lambda)? * (2.0 * lambda).sqrt())
}

/// Full spectral data of one oscillator.
#[derive(Debug, Clone)]
pub struct MorseSpectrum {
    pub params: MorseParams,
    pub count: usize,
    pub energies: Vec<f64>,
    pub x_elements: DMatrix<f64>,
    /// `N = lambda - 1/2`.
    pub big_n: f64,
}

impl MorseSpectrum {
    pub fn new(params: MorseParams) -> Result<Self> {
        let x_elements = x_matrix(params.lambda)?;
        Self::with_x_elements(params, x_elements)
    }

    /// Reuses a position matrix computed for the same `lambda`; the
    /// elements do not depend on `omega`.
    pub fn with_x_elements(params: MorseParams, x_elements: DMatrix<f64>) -> Result<Self> {
        let count = bound_state_count(params.lambda)?;
        if x_elements.nrows() != count || x_elements.ncols() != count {
            return Err(Error::Precondition(format!(
                "position matrix is {}x{}, expected {count}x{count}",
                x_elements.nrows(),
                x_elements.ncols()
            )));
        }
        Ok(Self {
            params,
            count,
            energies: bound_energies(&params),
            x_elements,
            big_n: params.lambda - 0.5,
        })
    }

    /// `b + b^dagger` in this basis.
    pub fn ladder(&self) -> DMatrix<f64> {
        &self.x_elements * (2.0 * self.params.lambda).sqrt()
    }
}

/// Bound-state wavefunction expressed in `z = (2N + 1) e^{-x}`.
///
/// Normalised so that `int psi_n(z)^2 dz / z = 1`, i.e. `int psi_n(x)^2 dx = 1`.
pub fn wavefunction_z(lambda: f64, n: usize, z: f64) -> Result<f64> {
    let count = bound_state_count(lambda)?;
    if n >= count {
        return Err(Error::Index { index: n, count });
    }
    if z <= 0.0 {
        return Ok(0.0);
    }
    if !z.is_finite() {
        return Ok(0.0);
    }
    let big_n = lambda - 0.5;
    let s = big_n - n as f64;
    let v = 2.0 * big_n - n as f64 + 1.0;
    let ln_norm = 0.5 * ((2.0 * s).ln() + log_gamma(v)? - ln_factorial(n));
    let ln_z = z.ln();
    let ln_prefactor = ln_norm + s * ln_z - 0.5 * z;

    let mut sum = CompensatedSum::default();
    for m in 0..=n {
        let ln_term = ln_prefactor + ln_binomial(n, m) + m as f64 * ln_z
            - log_gamma(2.0 * s + 1.0 + m as f64)?;
        let term = ln_term.exp();
        sum.add(if m % 2 == 0 { term } else { -term });
    }
    Ok(sum.total())
}

/// Bound-state wavefunction at dimensionless displacement `x`.
pub fn wavefunction(lambda: f64, n: usize, x: f64) -> Result<f64> {
    let big_n = lambda - 0.5;
    wavefunction_z(lambda, n, (2.0 * big_n + 1.0) * (-x).exp())
}

/// Neumaier summation.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}
