//! Exact pure-dephasing map of the impurity.
//!
//! The total Hamiltonian is block diagonal in the impurity basis, with bath
//! blocks `H^pm = sum_k (H_k pm B_k)`. The coherence factor is
//!
//! ```text
//! chi(t) = e^{i omega_s t} prod_k tr(e^{-i H_k^- t} rho_k e^{i H_k^+ t})
//! ```
//!
//! Each `H_k^pm` is diagonalised once. Because `rho_k` is diagonal in the
//! energy basis, each trace reduces to a fixed sum of weighted phases
//! `sum_ab W_ab e^{i (lambda^+_a - lambda^-_b) t}`, built once per mode.

use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::bath::BathMode;
use crate::error::{Error, Result};
use crate::state::{DensityMatrix, SystemConfig};
use crate::trace::{DephasingTrace, TimeGrid, TraceVariant};

/// Total `|W_ab|` that may be dropped from a mode factor.
const PHASE_PRUNE_TOLERANCE: f64 = 1e-15;

/// Eigen-decomposition `H = V diag(values) V^T` of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl Eigensystem {
    pub fn new(matrix: DMatrix<f64>) -> Self {
        let eigen = SymmetricEigen::new(matrix);
        Self {
            values: eigen.eigenvalues,
            vectors: eigen.eigenvectors,
        }
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.vectors * DMatrix::from_diagonal(&self.values) * self.vectors.transpose()
    }

    /// `e^{sign * i H t}` as a dense complex matrix.
    pub fn exponential(&self, t: f64, sign: f64) -> DMatrix<Complex64> {
        let v = self.vectors.map(|x| Complex64::new(x, 0.0));
        let phases = DVector::from_iterator(
            self.values.len(),
            self.values
                .iter()
                .map(|&l| Complex64::from_polar(1.0, sign * l * t)),
        );
        &v * DMatrix::from_diagonal(&phases) * v.transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct PhaseComponent {
    amplitude: f64,
    frequency: f64,
}

/// Diagonalised `H_k^pm = H_k pm B_k` of one mode plus its thermal weights.
#[derive(Debug, Clone)]
pub struct ModePropagators {
    pub plus: Eigensystem,
    pub minus: Eigensystem,
    pub weights: Vec<f64>,
    components: Vec<PhaseComponent>,
}

impl ModePropagators {
    pub fn new(mode: &BathMode) -> Self {
        Self::from_parts(mode.energies(), &mode.b_matrix, &mode.thermal.weights)
    }

    /// Propagators for `diag(energies) pm coupling` with thermal `weights`.
    pub fn from_parts(energies: &[f64], coupling: &DMatrix<f64>, weights: &[f64]) -> Self {
        let h0 = DMatrix::from_diagonal(&DVector::from_column_slice(energies));
        let plus = Eigensystem::new(&h0 + coupling);
        let minus = Eigensystem::new(&h0 - coupling);

        // tr(rho e^{iH+t} e^{-iH-t}) = sum_ab P_ab M_ab e^{i(l+_a - l-_b)t}
        // with P = V+^T diag(p) V- and M = V+^T V-.
        let p = DMatrix::from_diagonal(&DVector::from_column_slice(weights));
        let vp_t = plus.vectors.transpose();
        let thermal = &vp_t * p * &minus.vectors;
        let overlap = &vp_t * &minus.vectors;
        let d = energies.len();
        let mut components = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                components.push(PhaseComponent {
                    amplitude: thermal[(a, b)] * overlap[(a, b)],
                    frequency: plus.values[a] - minus.values[b],
                });
            }
        }
        let components = prune_components(components);
        Self {
            plus,
            minus,
            weights: weights.to_vec(),
            components,
        }
    }

    /// `tr(e^{-i H^- t} rho e^{i H^+ t})`.
    pub fn mode_factor(&self, t: f64) -> Complex64 {
        self.components
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, c| {
                acc + Complex64::from_polar(c.amplitude, c.frequency * t)
            })
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }
}

fn prune_components(components: Vec<PhaseComponent>) -> Vec<PhaseComponent> {
    let mut order: Vec<usize> = (0..components.len()).collect();
    order.sort_by(|&a, &b| {
        components[a]
            .amplitude
            .abs()
            .total_cmp(&components[b].amplitude.abs())
            .then(a.cmp(&b))
    });
    let mut keep = vec![true; components.len()];
    let mut dropped = 0.0;
    for &i in &order {
        let size = components[i].amplitude.abs();
        if dropped + size > PHASE_PRUNE_TOLERANCE {
            break;
        }
        dropped += size;
        keep[i] = false;
    }
    components
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect()
}

/// Diagonalises every mode in parallel.
pub fn build_propagators(modes: &[BathMode]) -> Vec<ModePropagators> {
    modes.par_iter().map(ModePropagators::new).collect()
}

/// `chi(t)` from precomputed propagators; factors multiply in mode order.
pub fn chi_from_propagators(
    propagators: &[ModePropagators],
    omega_s: f64,
    grid: &TimeGrid,
) -> DephasingTrace {
    let times = grid.times();
    let chi = times
        .par_iter()
        .map(|&t| {
            propagators
                .iter()
                .fold(Complex64::from_polar(1.0, omega_s * t), |acc, p| {
                    acc * p.mode_factor(t)
                })
        })
        .collect();
    DephasingTrace {
        times,
        chi,
        variant: TraceVariant::Exact,
    }
}

/// Exact decay factor on `grid`.
pub fn chi_series(modes: &[BathMode], system: &SystemConfig, grid: &TimeGrid) -> DephasingTrace {
    chi_from_propagators(&build_propagators(modes), system.omega_s, grid)
}

/// Pauli coefficients `(c_0, c_x, c_y, c_z)` of a real symmetric 2x2 matrix.
pub fn pauli_coefficients(h: &DMatrix<f64>) -> [f64; 4] {
    [
        0.5 * (h[(0, 0)] + h[(1, 1)]),
        0.5 * (h[(0, 1)] + h[(1, 0)]),
        0.0,
        0.5 * (h[(0, 0)] - h[(1, 1)]),
    ]
}

/// `e^{sign * i (c . sigma) t}` in closed form.
pub fn pauli_exponential(c: &[f64; 4], t: f64, sign: f64) -> Matrix2<Complex64> {
    let norm = (c[1] * c[1] + c[2] * c[2] + c[3] * c[3]).sqrt();
    let cos = Complex64::new((norm * t).cos(), 0.0);
    // sin(|c| t) / |c|, continuous at |c| = 0
    let sinc = if norm > 0.0 {
        (norm * t).sin() / norm
    } else {
        t
    };
    let i_s = Complex64::new(0.0, sign * sinc);
    let (x, y, z) = (c[1], c[2], c[3]);
    let sigma = Matrix2::new(
        Complex64::new(z, 0.0),
        Complex64::new(x, -y),
        Complex64::new(x, y),
        Complex64::new(-z, 0.0),
    );
    (Matrix2::identity() * cos + sigma * i_s) * Complex64::from_polar(1.0, sign * c[0] * t)
}

/// `chi(t)` for a bath of two-level modes through the Pauli closed forms.
pub fn spin_chi(
    modes: &[BathMode],
    system: &SystemConfig,
    grid: &TimeGrid,
) -> Result<DephasingTrace> {
    if let Some(mode) = modes.iter().find(|m| m.dimension() != 2) {
        return Err(Error::Precondition(format!(
            "spin fast path needs two bound states, mode {} has {}",
            mode.index,
            mode.dimension()
        )));
    }
    let coefficients: Vec<([f64; 4], [f64; 4], [f64; 2])> = modes
        .iter()
        .map(|mode| {
            let h0 = DMatrix::from_diagonal(&DVector::from_column_slice(mode.energies()));
            let plus = pauli_coefficients(&(&h0 + &mode.b_matrix));
            let minus = pauli_coefficients(&(&h0 - &mode.b_matrix));
            let w = &mode.thermal.weights;
            (plus, minus, [w[0], w[1]])
        })
        .collect();

    let times = grid.times();
    let chi = times
        .par_iter()
        .map(|&t| {
            coefficients.iter().fold(
                Complex64::from_polar(1.0, system.omega_s * t),
                |acc, (plus, minus, w)| {
                    let product =
                        pauli_exponential(plus, t, 1.0) * pauli_exponential(minus, t, -1.0);
                    acc * (product[(0, 0)] * w[0] + product[(1, 1)] * w[1])
                },
            )
        })
        .collect();
    Ok(DephasingTrace {
        times,
        chi,
        variant: TraceVariant::SpinFastPath,
    })
}

/// Reduced state at a time where the decay factor equals `chi`.
///
/// Populations are untouched; `<-|rho|+>` is multiplied by `chi` and
/// `<+|rho|->` by its conjugate.
pub fn apply_map(rho0: &DensityMatrix, chi: Complex64) -> DensityMatrix {
    let mut m = *rho0.matrix();
    m[(1, 0)] *= chi;
    m[(0, 1)] *= chi.conj();
    DensityMatrix::from_matrix_unchecked(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{discretize, BathConfig};
    use crate::morse::{MorseParams, MorseSpectrum};

    fn bath(lambda: f64, beta: f64, eta: f64, k_modes: usize) -> Vec<BathMode> {
        discretize(&BathConfig {
            eta,
            omega_c: 1.0,
            k_modes,
            lambda,
            beta,
        })
        .unwrap()
    }

    #[test]
    fn eigensystems_reconstruct() {
        for mode in bath(3.6, 1.0, 2.0, 6) {
            let prop = ModePropagators::new(&mode);
            let h0 = DMatrix::from_diagonal(&DVector::from_column_slice(mode.energies()));
            let err_plus = (prop.plus.reconstruct() - (&h0 + &mode.b_matrix)).amax();
            let err_minus = (prop.minus.reconstruct() - (&h0 - &mode.b_matrix)).amax();
            assert!(err_plus < 1e-10 && err_minus < 1e-10);
        }
    }

    #[test]
    fn mode_factor_examples() {
        for mode in bath(2.6, 1.0, 2.0, 5) {
            let prop = ModePropagators::new(&mode);
            assert!((prop.mode_factor(0.0) - 1.0).norm() < 1e-12);
        }
        // decoupled mode
        let spectrum = MorseSpectrum::new(MorseParams::new(1.0, 3.6).unwrap()).unwrap();
        let free = BathMode::new(1, spectrum, 0.0, 1.0);
        let prop = ModePropagators::new(&free);
        for i in 0..50 {
            assert!((prop.mode_factor(0.4 * i as f64) - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn single_bound_state_is_a_pure_phase() {
        let spectrum = MorseSpectrum::new(MorseParams::new(0.8, 1.4).unwrap()).unwrap();
        assert_eq!(spectrum.count, 1);
        let g = 0.3;
        let mode = BathMode::new(1, spectrum.clone(), g, 2.0);
        let b00 = g * (2.0 * 1.4_f64).sqrt() * spectrum.x_elements[(0, 0)];
        let prop = ModePropagators::new(&mode);
        for i in 0..20 {
            let t = 0.7 * i as f64;
            let expected = Complex64::from_polar(1.0, 2.0 * b00 * t);
            assert!((prop.mode_factor(t) - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn decoupled_bath_is_a_free_phase() {
        let modes = bath(2.6, 1.0, 0.0, 10);
        let grid = TimeGrid::new(5.0, 0.05).unwrap();
        let trace = chi_series(&modes, &SystemConfig::default(), &grid);
        for (t, chi) in trace.times.iter().zip(&trace.chi) {
            assert!((chi - Complex64::from_polar(1.0, 2.0 * t)).norm() < 1e-12);
        }
    }

    #[test]
    fn factorisation_over_mode_subsets() {
        let modes = bath(3.6, 4.0, 2.0, 12);
        let grid = TimeGrid::new(10.0, 0.1).unwrap();
        let system = SystemConfig::default();
        let whole = chi_series(&modes, &system, &grid);
        let first = chi_series(&modes[..6], &system, &grid);
        let second = chi_series(
            &modes[6..],
            &SystemConfig {
                omega_s: 0.0,
                ..system
            },
            &grid,
        );
        for i in 0..whole.len() {
            assert!((whole.chi[i] - first.chi[i] * second.chi[i]).norm() < 1e-13);
        }
    }

    #[test]
    fn spin_path_matches_general_path() {
        let modes = bath(2.3, 4.0, 0.5, 5);
        let grid = TimeGrid::default();
        let system = SystemConfig::default();
        let general = chi_series(&modes, &system, &grid);
        let spin = spin_chi(&modes, &system, &grid).unwrap();
        assert!(general.max_deviation(&spin).unwrap() < 1e-12);
    }

    #[test]
    fn spin_path_rejects_larger_modes() {
        let modes = bath(2.6, 4.0, 0.5, 3);
        let err = spin_chi(&modes, &SystemConfig::default(), &TimeGrid::default());
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn pauli_exponentials_are_unitary() {
        for mode in bath(2.3, 1.0, 2.0, 5) {
            let h0 = DMatrix::from_diagonal(&DVector::from_column_slice(mode.energies()));
            for h in [&h0 + &mode.b_matrix, &h0 - &mode.b_matrix] {
                let c = pauli_coefficients(&h);
                for &t in &[0.0, 0.3, 7.1, 19.9] {
                    for sign in [1.0, -1.0] {
                        let u = pauli_exponential(&c, t, sign);
                        assert!((u.determinant().norm() - 1.0).abs() < 1e-12);
                        let eye = u * u.adjoint();
                        assert!((eye - Matrix2::identity()).norm() < 1e-12);
                    }
                }
            }
        }
        let u = pauli_exponential(&[0.2, 0.0, 0.0, 0.0], 1.0, 1.0);
        assert!((u[(0, 0)] - Complex64::from_polar(1.0, 0.2)).norm() < 1e-15);
    }

    #[test]
    fn apply_map_examples() {
        let rho0 = DensityMatrix::half_polarized_x();
        assert_eq!(apply_map(&rho0, Complex64::new(1.0, 0.0)), rho0);
        let dephased = apply_map(&rho0, Complex64::new(0.0, 0.0));
        assert_eq!(dephased.coherence(), Complex64::new(0.0, 0.0));
        assert_eq!(dephased.population_plus(), 0.5);
        assert_eq!(dephased.population_minus(), 0.5);

        let rho = DensityMatrix::from_parts(0.7, 0.3, Complex64::new(0.2, -0.3)).unwrap();
        for i in 0..50 {
            let chi = Complex64::from_polar(0.02 * i as f64, 0.9 * i as f64);
            let mapped = apply_map(&rho, chi);
            assert!(
                (mapped.coherence().norm() - chi.norm() * rho.coherence().norm()).abs() < 1e-15
            );
            let m = mapped.matrix();
            assert_eq!(m[(0, 1)], m[(1, 0)].conj());
            assert!(m[(0, 1)].norm_sqr() <= m[(0, 0)].re * m[(1, 1)].re);
        }
    }

    #[test]
    fn mean_field_phase_separates() {
        let modes = bath(2.6, 1.0, 2.0, 8);
        let grid = TimeGrid::new(20.0, 0.05).unwrap();
        let bare = chi_series(&modes, &SystemConfig::default(), &grid);
        let renormalised: Vec<ModePropagators> = modes
            .iter()
            .map(|m| {
                ModePropagators::from_parts(m.energies(), &m.thermal.b_tilde, &m.thermal.weights)
            })
            .collect();
        let tilde = chi_from_propagators(&renormalised, 2.0, &grid);
        let shift = crate::correlation::mean_field_shift(&modes);
        for i in 0..bare.len() {
            let t = bare.times[i];
            let expected = tilde.chi[i] * Complex64::from_polar(1.0, shift * t);
            assert!((bare.chi[i] - expected).norm() < 1e-11);
        }
    }
}
