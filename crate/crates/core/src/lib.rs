//! Dephasing of a two-level impurity coupled to a finite bath of Morse
//! oscillators.
//!
//! The exact dynamics factorises over bath modes, so `K` oscillators with `d`
//! bound states each cost `O(K d^3)` once plus `O(K d^2)` per time point,
//! instead of exponentiating the `d^K` dimensional bath. Alongside the exact
//! decay factor the crate computes the Gaussian (second-cumulant) surrogate,
//! the bath correlation function, and non-Markovianity diagnostics.

pub mod bath;
pub mod correlation;
pub mod dynamics;
pub mod error;
pub mod morse;
pub mod observables;
pub mod oracle;
pub mod quadrature;
pub mod specfun;
pub mod state;
pub mod trace;

pub use bath::{discretize, spectral_density, BathConfig, BathMode};
pub use correlation::{build_correlation, mean_field_shift, CorrelationModel};
pub use dynamics::{apply_map, chi_series, spin_chi, ModePropagators};
pub use error::{Error, Result};
pub use morse::{bound_state_count, MorseParams, MorseSpectrum};
pub use state::{DensityMatrix, SystemConfig};
pub use trace::{DephasingTrace, TimeGrid, TraceVariant};
