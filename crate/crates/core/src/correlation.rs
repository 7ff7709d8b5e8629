//! Second-order bath correlation function and the Gaussian surrogate map.
//!
//! With the renormalised couplings `B~_k = B_k - <B_k>`,
//!
//! ```text
//! alpha(t) = C0 + sum_k sum_{n != p} p_kn |B~_k[n][p]|^2 e^{i (E_kn - E_kp) t}
//! ```
//!
//! The Gaussian map keeps only this second moment:
//! `chi_G(t) = exp(i (omega_s + 2 sum_k <B_k>) t - Gamma(t))` with
//! `Gamma(t) = 4 Re int_0^t ds int_0^s du alpha(s - u)`.
//!
//! For the coherence multiplied by `chi`, the imaginary parts of the two
//! time-ordered second-order contributions cancel, so `Gamma` is real and no
//! second-order phase appears.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bath::BathMode;
use crate::error::{Error, Result};
use crate::trace::{DephasingTrace, TimeGrid, TraceVariant};

/// Terms with `|delta|` below this use the `t^2` branch of `Gamma`.
const DEGENERATE_DELTA: f64 = 1e-12;

/// Correlation weight that may be discarded, relative to `C(0)`.
const PRUNE_TOLERANCE: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationTerm {
    pub weight: f64,
    /// `E_kn - E_kp`.
    pub delta: f64,
}

#[derive(Debug, Clone)]
pub struct CorrelationModel {
    pub offset_c0: f64,
    pub terms: Vec<CorrelationTerm>,
}

/// Collects the offset and the oscillating terms of every mode.
///
/// Zero-weight terms are skipped, and the smallest terms whose combined
/// weight stays below `1e-16 * C(0)` are dropped; neither changes any
/// evaluated quantity at double precision.
pub fn build_correlation(modes: &[BathMode]) -> CorrelationModel {
    let mut offset_c0 = 0.0;
    let mut terms = Vec::new();
    for mode in modes {
        let thermal = &mode.thermal;
        let energies = mode.energies();
        let d = mode.dimension();
        for n in 0..d {
            let p = thermal.weights[n];
            offset_c0 += p * thermal.b_tilde[(n, n)].powi(2);
            for q in 0..d {
                if q == n {
                    continue;
                }
                let weight = p * thermal.b_tilde[(n, q)].powi(2);
                if weight > 0.0 {
                    terms.push(CorrelationTerm {
                        weight,
                        delta: energies[n] - energies[q],
                    });
                }
            }
        }
    }

    let total: f64 = terms.iter().map(|t| t.weight).sum();
    let mut order: Vec<usize> = (0..terms.len()).collect();
    order.sort_by(|&a, &b| terms[a].weight.total_cmp(&terms[b].weight).then(a.cmp(&b)));
    let mut dropped = 0.0;
    let mut keep = vec![true; terms.len()];
    for &i in &order {
        if dropped + terms[i].weight > PRUNE_TOLERANCE * total {
            break;
        }
        dropped += terms[i].weight;
        keep[i] = false;
    }
    let terms = terms
        .into_iter()
        .zip(keep)
        .filter_map(|(t, k)| k.then_some(t))
        .collect();

    CorrelationModel { offset_c0, terms }
}

/// `2 sum_k <B_k>`: the first-order (mean-field) frequency shift of the coherence.
pub fn mean_field_shift(modes: &[BathMode]) -> f64 {
    2.0 * modes.iter().map(|m| m.thermal.mean_b).sum::<f64>()
}

impl CorrelationModel {
    /// `C(0)`, the total weight of the time-dependent part.
    pub fn c_at_zero(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    pub fn alpha(&self, t: f64) -> Complex64 {
        self.terms
            .iter()
            .fold(Complex64::new(self.offset_c0, 0.0), |acc, term| {
                acc + Complex64::from_polar(term.weight, term.delta * t)
            })
    }

    /// `C0 / C(0)`.
    pub fn offset_ratio(&self) -> Result<f64> {
        let c0 = self.c_at_zero();
        if c0 > 0.0 {
            Ok(self.offset_c0 / c0)
        } else {
            Err(Error::ZeroCorrelation("offset ratio"))
        }
    }

    /// `Gamma(t) = 4 Re int_0^t ds int_0^s du alpha(s - u)` in closed form.
    pub fn gamma_decay(&self, t: f64) -> f64 {
        let oscillating: f64 = self
            .terms
            .iter()
            .map(|term| {
                if term.delta.abs() < DEGENERATE_DELTA {
                    2.0 * term.weight * t * t
                } else {
                    let s = (0.5 * term.delta * t).sin() / term.delta;
                    8.0 * term.weight * s * s
                }
            })
            .sum();
        2.0 * self.offset_c0 * t * t + oscillating
    }

    pub fn gaussian_chi(&self, omega_s: f64, mean_shift: f64, t: f64) -> Complex64 {
        Complex64::from_polar((-self.gamma_decay(t)).exp(), (omega_s + mean_shift) * t)
    }

    /// `chi_G` on a whole grid.
    pub fn gaussian_series(
        &self,
        omega_s: f64,
        mean_shift: f64,
        grid: &TimeGrid,
    ) -> DephasingTrace {
        let times = grid.times();
        let chi = times
            .par_iter()
            .map(|&t| self.gaussian_chi(omega_s, mean_shift, t))
            .collect();
        DephasingTrace {
            times,
            chi,
            variant: TraceVariant::Gaussian,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{discretize, BathConfig};
    use crate::morse::{MorseParams, MorseSpectrum};
    use std::f64::consts::PI;

    fn single_term(weight: f64, delta: f64, offset: f64) -> CorrelationModel {
        CorrelationModel {
            offset_c0: offset,
            terms: vec![CorrelationTerm { weight, delta }],
        }
    }

    #[test]
    fn two_level_closed_form() {
        let spectrum = MorseSpectrum::new(MorseParams::new(1.0, 2.5).unwrap()).unwrap();
        let mode = BathMode::new(1, spectrum, 0.4, 1.0);
        let model = build_correlation(std::slice::from_ref(&mode));
        let p = &mode.thermal.weights;
        let bt = &mode.thermal.b_tilde;
        let c0 = p[0] * bt[(0, 0)].powi(2) + p[1] * bt[(1, 1)].powi(2);
        assert!((model.offset_c0 - c0).abs() < 1e-15);
        let alpha0 = model.alpha(0.0);
        let expected = (p[0] + p[1]) * mode.b_matrix[(0, 1)].powi(2) + c0;
        assert!((alpha0.re - expected).abs() < 1e-14);
        assert!(alpha0.im.abs() < 1e-14);
    }

    #[test]
    fn alpha_examples() {
        let model = single_term(1.0, 2.0, 0.0);
        let a = model.alpha(PI / 2.0);
        assert!((a.re + 1.0).abs() < 1e-15 && a.im.abs() < 1e-15);
    }

    #[test]
    fn alpha_hermitian_in_time() {
        let modes = discretize(&BathConfig {
            eta: 0.5,
            omega_c: 1.0,
            k_modes: 8,
            lambda: 3.6,
            beta: 2.0,
        })
        .unwrap();
        let model = build_correlation(&modes);
        assert!(model.alpha(0.0).re > 0.0);
        for i in 0..100 {
            let t = 0.37 * i as f64 - 17.0;
            let diff = model.alpha(-t) - model.alpha(t).conj();
            assert!(diff.norm() < 1e-13);
        }
    }

    #[test]
    fn gamma_closed_forms() {
        let model = single_term(0.7, 1.3, 0.0);
        assert_eq!(model.gamma_decay(0.0), 0.0);
        for &t in &[0.1f64, 1.0, 4.2] {
            let expected = 8.0 * 0.7 * (1.3 * t / 2.0).sin().powi(2) / (1.3 * 1.3);
            assert!((model.gamma_decay(t) - expected).abs() < 1e-14);
        }
        let offset_only = CorrelationModel {
            offset_c0: 0.3,
            terms: vec![],
        };
        assert!((offset_only.gamma_decay(2.0) - 2.0 * 0.3 * 4.0).abs() < 1e-15);
        let degenerate = single_term(0.5, 1e-14, 0.0);
        assert!((degenerate.gamma_decay(3.0) - 9.0).abs() < 1e-12);
    }

    #[test]
    fn offset_ratio_requires_coupling() {
        let modes = discretize(&BathConfig {
            eta: 0.0,
            omega_c: 1.0,
            k_modes: 10,
            lambda: 2.6,
            beta: 1.0,
        })
        .unwrap();
        let model = build_correlation(&modes);
        assert!(model.terms.is_empty());
        assert!(matches!(
            model.offset_ratio(),
            Err(Error::ZeroCorrelation(_))
        ));
    }

    #[test]
    fn gaussian_chi_bounded() {
        let model = single_term(0.7, 1.3, 0.05);
        assert!((model.gaussian_chi(2.0, 0.3, 0.0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        for i in 0..200 {
            let t = 0.1 * i as f64;
            assert!(model.gaussian_chi(2.0, 0.3, t).norm() <= 1.0);
            assert!(model.gamma_decay(t) >= 0.0);
        }
    }
}
