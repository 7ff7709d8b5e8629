//! Brute-force cross-checks that share no code path with the fast routines:
//! dense evolution on the full tensor-product bath space, and position
//! matrix elements by quadrature over the bound-state wavefunctions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::bath::BathMode;
use crate::dynamics::Eigensystem;
use crate::error::{Error, Result};
use crate::morse::{bound_state_count, wavefunction_z};
use crate::quadrature::{integrate, QuadratureOptions};
use crate::state::SystemConfig;
use crate::trace::{DephasingTrace, TimeGrid, TraceVariant};

pub const MAX_DENSE_MODES: usize = 3;
pub const MAX_DENSE_DIMENSION: usize = 4096;

/// Bath Hamiltonian blocks and thermal state on the full product space.
#[derive(Debug, Clone)]
pub struct DenseBath {
    pub dimension: usize,
    pub h_plus: DMatrix<f64>,
    pub h_minus: DMatrix<f64>,
    /// Diagonal of the product thermal state.
    pub thermal: DVector<f64>,
}

impl DenseBath {
    pub fn new(modes: &[BathMode]) -> Result<Self> {
        if modes.len() > MAX_DENSE_MODES {
            return Err(Error::Precondition(format!(
                "dense oracle supports at most {MAX_DENSE_MODES} modes, got {}",
                modes.len()
            )));
        }
        let dimension: usize = modes.iter().map(|m| m.dimension()).product();
        if dimension > MAX_DENSE_DIMENSION {
            return Err(Error::DimensionGuard {
                dimension,
                limit: MAX_DENSE_DIMENSION,
            });
        }

        let mut h_plus = DMatrix::zeros(dimension, dimension);
        let mut h_minus = DMatrix::zeros(dimension, dimension);
        let mut thermal = DVector::from_element(1, 1.0);
        let mut before = 1;
        for mode in modes {
            let d = mode.dimension();
            let after = dimension / (before * d);
            let h0 = DMatrix::from_diagonal(&DVector::from_column_slice(mode.energies()));
            let left = DMatrix::<f64>::identity(before, before);
            let right = DMatrix::<f64>::identity(after, after);
            let embed = |local: &DMatrix<f64>| left.kronecker(local).kronecker(&right);
            h_plus += embed(&(&h0 + &mode.b_matrix));
            h_minus += embed(&(&h0 - &mode.b_matrix));
            thermal = thermal.kronecker(&DVector::from_column_slice(&mode.thermal.weights));
            before *= d;
        }
        Ok(Self {
            dimension,
            h_plus,
            h_minus,
            thermal,
        })
    }

    /// `e^{i omega_s t} tr(e^{-i H^- t} rho_E e^{i H^+ t})` by full matrix products.
    pub fn chi(&self, omega_s: f64, grid: &TimeGrid) -> DephasingTrace {
        let plus = Eigensystem::new(self.h_plus.clone());
        let minus = Eigensystem::new(self.h_minus.clone());
        let rho = DMatrix::from_diagonal(&self.thermal.map(|p| Complex64::new(p, 0.0)));
        let times = grid.times();
        let chi = times
            .iter()
            .map(|&t| {
                let evolved = minus.exponential(t, -1.0) * &rho * plus.exponential(t, 1.0);
                evolved.trace() * Complex64::from_polar(1.0, omega_s * t)
            })
            .collect();
        DephasingTrace {
            times,
            chi,
            variant: TraceVariant::Dense,
        }
    }
}

/// Decay factor from dense evolution of at most three modes.
pub fn dense_chi(
    modes: &[BathMode],
    system: &SystemConfig,
    grid: &TimeGrid,
) -> Result<DephasingTrace> {
    Ok(DenseBath::new(modes)?.chi(system.omega_s, grid))
}

fn quadrature_in_z<F: Fn(f64) -> f64>(lambda: f64, n: usize, m: usize, weight: F) -> Result<f64> {
    let count = bound_state_count(lambda)?;
    for index in [n, m] {
        if index >= count {
            return Err(Error::Index { index, count });
        }
    }
    let big_n = lambda - 0.5;
    let width = 2.0 * big_n + 1.0;
    // z = s^p flattens the z^{2(N-n)-1} behaviour at the origin.
    let smallest_exponent = big_n - n.max(m) as f64;
    let power = (1.0 / smallest_exponent).max(1.0);
    let z_max = 2.0 * width + 80.0;
    let integrand = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        let z = s.powf(power);
        let psi_n = wavefunction_z(lambda, n, z).expect("index checked");
        let psi_m = wavefunction_z(lambda, m, z).expect("index checked");
        // dx = -dz / z and dz / z = power ds / s
        psi_n * psi_m * weight(z) * power / s
    };
    let options = QuadratureOptions {
        abs_tol: 1e-11,
        rel_tol: 1e-13,
        max_intervals: 4000,
    };
    Ok(integrate(integrand, 0.0, z_max.powf(1.0 / power), options)?.value)
}

/// `<n|x|m>` by adaptive quadrature over the wavefunctions.
pub fn quadrature_element(lambda: f64, n: usize, m: usize) -> Result<f64> {
    let width = 2.0 * (lambda - 0.5) + 1.0;
    quadrature_in_z(lambda, n, m, |z| (width / z).ln())
}

/// `<n|m>` by adaptive quadrature.
pub fn quadrature_overlap(lambda: f64, n: usize, m: usize) -> Result<f64> {
    quadrature_in_z(lambda, n, m, |_| 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{discretize, BathConfig};
    use crate::dynamics::chi_series;
    use crate::morse::{x_matrix, MorseParams, MorseSpectrum};

    #[test]
    fn quadrature_reference_elements() {
        let e00 = quadrature_element(2.5, 0, 0).unwrap();
        let e01 = quadrature_element(2.5, 0, 1).unwrap();
        let e10 = quadrature_element(2.5, 1, 0).unwrap();
        assert!((e00 - 0.353_320).abs() < 1e-6);
        assert!((e01 - 0.471_405).abs() < 1e-6);
        assert_eq!(e01, e10);
        let closed = x_matrix(2.5).unwrap();
        assert!((e00 - closed[(0, 0)]).abs() < 1e-8);
        assert!((e01 - closed[(0, 1)]).abs() < 1e-8);
    }

    #[test]
    fn gram_matrix_is_identity() {
        for &lambda in &[2.5, 2.6, 5.5] {
            let d = bound_state_count(lambda).unwrap();
            for n in 0..d {
                for m in 0..d {
                    let overlap = quadrature_overlap(lambda, n, m).unwrap();
                    let expected = if n == m { 1.0 } else { 0.0 };
                    assert!(
                        (overlap - expected).abs() < 1e-8,
                        "lambda {lambda} ({n},{m}): {overlap}"
                    );
                }
            }
        }
    }

    #[test]
    fn index_errors() {
        assert!(matches!(
            quadrature_element(2.5, 0, 2),
            Err(Error::Index { .. })
        ));
    }

    #[test]
    fn single_mode_dense_matches_factor() {
        let spectrum = MorseSpectrum::new(MorseParams::new(0.7, 2.6).unwrap()).unwrap();
        let mode = BathMode::new(1, spectrum, 0.5, 1.0);
        let grid = TimeGrid::new(20.0, 0.1).unwrap();
        let system = SystemConfig::default();
        let dense = dense_chi(std::slice::from_ref(&mode), &system, &grid).unwrap();
        let fast = chi_series(std::slice::from_ref(&mode), &system, &grid);
        assert!(dense.max_deviation(&fast).unwrap() < 1e-12);
    }

    #[test]
    fn decoupled_dense_bath() {
        let modes = discretize(&BathConfig {
            eta: 0.0,
            omega_c: 1.0,
            k_modes: 2,
            lambda: 2.6,
            beta: 1.0,
        })
        .unwrap();
        let grid = TimeGrid::new(5.0, 0.1).unwrap();
        let dense = dense_chi(&modes, &SystemConfig::default(), &grid).unwrap();
        for (t, chi) in dense.times.iter().zip(&dense.chi) {
            assert!((chi - Complex64::from_polar(1.0, 2.0 * t)).norm() < 1e-12);
        }
    }

    #[test]
    fn dense_thermal_state_normalised() {
        let modes = discretize(&BathConfig {
            eta: 1.0,
            omega_c: 1.0,
            k_modes: 3,
            lambda: 3.6,
            beta: 2.0,
        })
        .unwrap();
        let dense = DenseBath::new(&modes).unwrap();
        assert_eq!(dense.dimension, 64);
        assert!((dense.thermal.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dense_guards() {
        let config = BathConfig {
            eta: 1.0,
            omega_c: 1.0,
            k_modes: 4,
            lambda: 2.6,
            beta: 2.0,
        };
        let modes = discretize(&config).unwrap();
        assert!(matches!(
            DenseBath::new(&modes),
            Err(Error::Precondition(_))
        ));
        let big = discretize(&BathConfig {
            k_modes: 3,
            lambda: 20.3,
            ..config
        })
        .unwrap();
        assert!(matches!(
            DenseBath::new(&big),
            Err(Error::DimensionGuard {
                dimension: 8000,
                ..
            })
        ));
    }
}
