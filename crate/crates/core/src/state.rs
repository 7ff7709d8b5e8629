//! Two-level system states in the `(|+>, |->)` basis.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};

const STATE_TOLERANCE: f64 = 1e-10;

/// Hermitian, unit-trace, positive semidefinite 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Matrix2<Complex64>);

impl DensityMatrix {
    pub fn new(matrix: Matrix2<Complex64>) -> Result<Self> {
        let invalid = |reason: String| {
            Err(Error::InvalidParameter {
                field: "rho0",
                reason,
            })
        };
        if (matrix[(0, 1)] - matrix[(1, 0)].conj()).norm() > STATE_TOLERANCE
            || matrix[(0, 0)].im.abs() > STATE_TOLERANCE
            || matrix[(1, 1)].im.abs() > STATE_TOLERANCE
        {
            return invalid("matrix is not Hermitian".into());
        }
        let trace = matrix[(0, 0)].re + matrix[(1, 1)].re;
        if (trace - 1.0).abs() > STATE_TOLERANCE {
            return invalid(format!("trace is {trace}, expected 1"));
        }
        let (p, q) = (matrix[(0, 0)].re, matrix[(1, 1)].re);
        if p < -STATE_TOLERANCE
            || q < -STATE_TOLERANCE
            || matrix[(0, 1)].norm_sqr() > p * q + STATE_TOLERANCE
        {
            return invalid("matrix is not positive semidefinite".into());
        }
        Ok(Self(matrix))
    }

    /// State from the populations of `|+>`, `|->` and the coherence `<+|rho|->`.
    pub fn from_parts(p_plus: f64, p_minus: f64, coherence: Complex64) -> Result<Self> {
        Self::new(Matrix2::new(
            Complex64::new(p_plus, 0.0),
            coherence,
            coherence.conj(),
            Complex64::new(p_minus, 0.0),
        ))
    }

    /// `(1 + sigma_x / 2) / 2`.
    pub fn half_polarized_x() -> Self {
        Self::from_parts(0.5, 0.5, Complex64::new(0.25, 0.0)).expect("valid state")
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    pub fn population_plus(&self) -> f64 {
        self.0[(0, 0)].re
    }

    pub fn population_minus(&self) -> f64 {
        self.0[(1, 1)].re
    }

    /// `<+|rho|->`.
    pub fn coherence(&self) -> Complex64 {
        self.0[(0, 1)]
    }

    pub(crate) fn from_matrix_unchecked(matrix: Matrix2<Complex64>) -> Self {
        Self(matrix)
    }
}

impl Default for DensityMatrix {
    fn default() -> Self {
        Self::half_polarized_x()
    }
}

/// Impurity splitting and initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub omega_s: f64,
    pub rho0: DensityMatrix,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            omega_s: 2.0,
            rho0: DensityMatrix::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(DensityMatrix::from_parts(0.5, 0.5, Complex64::new(0.5, 0.0)).is_ok());
        assert!(DensityMatrix::from_parts(0.5, 0.5, Complex64::new(0.6, 0.0)).is_err());
        assert!(DensityMatrix::from_parts(0.7, 0.5, Complex64::new(0.0, 0.0)).is_err());
        let not_hermitian = Matrix2::new(
            Complex64::new(0.5, 0.0),
            Complex64::new(0.1, 0.0),
            Complex64::new(0.2, 0.0),
            Complex64::new(0.5, 0.0),
        );
        assert!(DensityMatrix::new(not_hermitian).is_err());
    }

    #[test]
    fn default_state() {
        let rho = DensityMatrix::default();
        assert_eq!(rho.coherence(), Complex64::new(0.25, 0.0));
        assert_eq!(rho.population_plus(), 0.5);
    }
}
