use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniform time grid `0, dt, 2 dt, ..., t_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub dt: f64,
    pub steps: usize,
}

impl TimeGrid {
    /// Grid covering `[0, t_max]`; `t_max` is rounded to a whole number of steps.
    pub fn new(t_max: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "dt",
                reason: format!("must be positive, got {dt}"),
            });
        }
        if !(t_max > 0.0 && t_max.is_finite()) || dt >= t_max {
            return Err(Error::InvalidParameter {
                field: "t_max",
                reason: format!("must be positive and exceed dt = {dt}, got {t_max}"),
            });
        }
        let steps = (t_max / dt).round() as usize;
        Ok(Self { dt, steps })
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn t_max(&self) -> f64 {
        self.time(self.steps)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.time(i)).collect()
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            dt: 0.01,
            steps: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceVariant {
    Exact,
    Gaussian,
    SpinFastPath,
    Dense,
}

/// Decay factor `chi(t)` sampled on a time grid.
#[derive(Debug, Clone)]
pub struct DephasingTrace {
    pub times: Vec<f64>,
    pub chi: Vec<Complex64>,
    pub variant: TraceVariant,
}

impl DephasingTrace {
    pub fn abs(&self) -> Vec<f64> {
        self.chi.iter().map(|c| c.norm()).collect()
    }

    pub fn len(&self) -> usize {
        self.chi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chi.is_empty()
    }

    pub fn min_abs(&self) -> f64 {
        self.chi
            .iter()
            .map(|c| c.norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest pointwise `|chi_self - chi_other|`.
    pub fn max_deviation(&self, other: &DephasingTrace) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .chi
            .iter()
            .zip(&other.chi)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn check_same_grid(&self, other: &DephasingTrace) -> Result<()> {
        if self.times.len() != other.times.len() {
            return Err(Error::GridMismatch(format!(
                "{} vs {} points",
                self.times.len(),
                other.times.len()
            )));
        }
        if let Some(i) = self
            .times
            .iter()
            .zip(&other.times)
            .position(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(1.0))
        {
            return Err(Error::GridMismatch(format!(
                "times differ at index {i}: {} vs {}",
                self.times[i], other.times[i]
            )));
        }
        Ok(())
    }
}
