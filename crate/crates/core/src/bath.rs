//! Ohmic bath discretised into `K` Morse oscillators.
//!
//! Mode `k` sits at `omega_k = 2 omega_c k / K` with coupling
//! `g_k = sqrt((2 omega_c / K) J(omega_k))`. Every mode shares the same
//! anharmonicity, so the position matrix is computed once and rescaled.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::morse::{x_matrix, MorseParams, MorseSpectrum};

/// Ohmic spectral density with a hard cut at `2 omega_c`.
///
/// The step is taken as zero at exactly `2 omega_c`.
pub fn spectral_density(omega: f64, eta: f64, omega_c: f64) -> f64 {
    if omega >= 2.0 * omega_c {
        return 0.0;
    }
    eta * (omega / omega_c) * (-omega / omega_c).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathConfig {
    pub eta: f64,
    pub omega_c: f64,
    pub k_modes: usize,
    pub lambda: f64,
    pub beta: f64,
}

impl BathConfig {
    pub fn validate(&self) -> Result<()> {
        let invalid = |field, reason: &str| {
            Err(Error::InvalidParameter {
                field,
                reason: reason.to_string(),
            })
        };
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return invalid("eta", "must be finite and non-negative");
        }
        if !(self.omega_c > 0.0 && self.omega_c.is_finite()) {
            return invalid("omega_c", "must be positive");
        }
        if self.k_modes == 0 {
            return invalid("k_modes", "must be at least 1");
        }
        if self.beta.is_nan() || self.beta <= 0.0 {
            return invalid("beta", "must be positive");
        }
        if !(self.lambda > 0.5 && self.lambda.is_finite()) {
            return invalid("lambda", "must exceed 1/2");
        }
        Ok(())
    }

    /// `(omega_k, g_k)` for `k = 1..=K`.
    pub fn frequencies_and_couplings(&self) -> Vec<(f64, f64)> {
        let spacing = 2.0 * self.omega_c / self.k_modes as f64;
        (1..=self.k_modes)
            .map(|k| {
                let omega = spacing * k as f64;
                let g = (spacing * spectral_density(omega, self.eta, self.omega_c)).sqrt();
                (omega, g)
            })
            .collect()
    }
}

/// Thermal data of one mode at inverse temperature `beta`.
#[derive(Debug, Clone)]
pub struct ModeThermal {
    /// Boltzmann weights `p_n`, summing to one.
    pub weights: Vec<f64>,
    /// Partition function with the ground energy shifted to zero.
    pub partition: f64,
    /// `<B_k>` in the thermal state.
    pub mean_b: f64,
    /// `B_k - <B_k>`, the renormalised coupling operator.
    pub b_tilde: DMatrix<f64>,
}

/// One discretised environment oscillator.
#[derive(Debug, Clone)]
pub struct BathMode {
    /// 1-based mode index.
    pub index: usize,
    pub omega: f64,
    pub coupling: f64,
    pub spectrum: MorseSpectrum,
    /// `B_k = g_k (b + b^dagger)` in the bound-state basis.
    pub b_matrix: DMatrix<f64>,
    pub thermal: ModeThermal,
}

impl BathMode {
    pub fn new(index: usize, spectrum: MorseSpectrum, coupling: f64, beta: f64) -> Self {
        let b_matrix = spectrum.ladder() * coupling;
        let thermal = mode_thermal(&spectrum.energies, &b_matrix, beta);
        Self {
            index,
            omega: spectrum.params.omega,
            coupling,
            spectrum,
            b_matrix,
            thermal,
        }
    }

    pub fn dimension(&self) -> usize {
        self.spectrum.count
    }

    pub fn energies(&self) -> &[f64] {
        &self.spectrum.energies
    }
}

/// Boltzmann weights, shifted partition function and renormalised coupling.
pub fn mode_thermal(energies: &[f64], b_matrix: &DMatrix<f64>, beta: f64) -> ModeThermal {
    let ground = energies[0];
    let boltzmann: Vec<f64> = energies
        .iter()
        .map(|&e| (-beta * (e - ground)).exp())
        .collect();
    let partition: f64 = boltzmann.iter().sum();
    let weights: Vec<f64> = boltzmann.iter().map(|w| w / partition).collect();
    let mean_b = weights
        .iter()
        .enumerate()
        .map(|(n, p)| p * b_matrix[(n, n)])
        .sum::<f64>();
    let mut b_tilde = b_matrix.clone();
    for n in 0..b_tilde.nrows() {
        b_tilde[(n, n)] -= mean_b;
    }
    ModeThermal {
        weights,
        partition,
        mean_b,
        b_tilde,
    }
}

/// Builds all `K` modes with their spectra and thermal data.
pub fn discretize(config: &BathConfig) -> Result<Vec<BathMode>> {
    config.validate()?;
    let x = x_matrix(config.lambda)?;
    config
        .frequencies_and_couplings()
        .into_iter()
        .enumerate()
        .map(|(i, (omega, g))| {
            let params = MorseParams::new(omega, config.lambda)?;
            let spectrum = MorseSpectrum::with_x_elements(params, x.clone())?;
            Ok(BathMode::new(i + 1, spectrum, g, config.beta))
        })
        .collect()
}
