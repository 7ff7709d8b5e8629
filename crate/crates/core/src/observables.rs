//! Dephasing time, BLP information flows, and exact-vs-Gaussian error metrics.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::dynamics::apply_map;
use crate::error::{Error, Result};
use crate::state::DensityMatrix;
use crate::trace::DephasingTrace;

/// Steps of `|chi|` smaller than this count as flat when splitting a series
/// into monotone segments.
pub const MONOTONE_TOLERANCE: f64 = 1e-12;

/// Default coherence fraction defining the dephasing time.
pub const DEFAULT_DEPHASING_THRESHOLD: f64 = 0.1;

/// First time at which `|rho_01(t)| / |rho_01(0)|` falls to `threshold`,
/// linearly interpolated between grid points. `None` if it never does.
pub fn dephasing_time(
    trace: &DephasingTrace,
    rho0: &DensityMatrix,
    threshold: f64,
) -> Result<Option<f64>> {
    let initial = rho0.coherence().norm();
    if initial == 0.0 {
        return Err(Error::Precondition(
            "initial state has no coherence to decay".into(),
        ));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidParameter {
            field: "threshold",
            reason: format!("must lie in (0, 1), got {threshold}"),
        });
    }
    let ratio = |chi: Complex64| apply_map(rho0, chi).coherence().norm() / initial;

    let mut previous = match trace.chi.first() {
        Some(&chi) => ratio(chi),
        None => return Ok(None),
    };
    if previous <= threshold {
        return Ok(Some(trace.times[0]));
    }
    for i in 1..trace.len() {
        let current = ratio(trace.chi[i]);
        if current <= threshold {
            let (t0, t1) = (trace.times[i - 1], trace.times[i]);
            let fraction = (previous - threshold) / (previous - current);
            return Ok(Some(t0 + fraction * (t1 - t0)));
        }
        previous = current;
    }
    Ok(None)
}

/// Information backflow `n_minus` and outflow `n_plus` of a `|chi|` series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowReport {
    pub n_minus: f64,
    pub n_plus: f64,
    /// `n_minus / n_plus`; `None` when nothing flows out.
    pub ratio: Option<f64>,
}

/// Sums the rises and falls of `abs_chi` over its maximal monotone segments.
///
/// Steps within [`MONOTONE_TOLERANCE`] extend the current segment instead of
/// opening a new one. Every step belongs to exactly one segment, so
/// `last - first = n_minus - n_plus` holds to rounding.
pub fn blp_flows(abs_chi: &[f64]) -> FlowReport {
    let mut n_minus = 0.0;
    let mut n_plus = 0.0;
    let mut close = |start: f64, end: f64| {
        let net = end - start;
        if net > 0.0 {
            n_minus += net;
        } else {
            n_plus -= net;
        }
    };

    if abs_chi.len() >= 2 {
        let mut start = 0;
        let mut rising: Option<bool> = None;
        for i in 1..abs_chi.len() {
            let step = abs_chi[i] - abs_chi[i - 1];
            let direction = if step > MONOTONE_TOLERANCE {
                true
            } else if step < -MONOTONE_TOLERANCE {
                false
            } else {
                continue;
            };
            match rising {
                Some(current) if current != direction => {
                    close(abs_chi[start], abs_chi[i - 1]);
                    start = i - 1;
                }
                _ => {}
            }
            rising = Some(direction);
        }
        close(abs_chi[start], abs_chi[abs_chi.len() - 1]);
    }

    let ratio = (n_plus > 0.0).then(|| n_minus / n_plus);
    FlowReport {
        n_minus,
        n_plus,
        ratio,
    }
}

fn hermitian_trace_norm(m: &Matrix2<Complex64>) -> f64 {
    let mean = 0.5 * (m[(0, 0)].re + m[(1, 1)].re);
    let half_gap = 0.5 * (m[(0, 0)].re - m[(1, 1)].re);
    let radius = (half_gap * half_gap + m[(0, 1)].norm_sqr()).sqrt();
    (mean + radius).abs() + (mean - radius).abs()
}

/// `D(a, b) = (1/2) Tr |a - b|`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    0.5 * hermitian_trace_norm(&(a.matrix() - b.matrix()))
}

#[derive(Debug, Clone)]
pub struct ErrorReport {
    /// `|chi(t) - chi_G(t)|`.
    pub pointwise: Vec<f64>,
    /// Trace distance between the exact and Gaussian reduced states.
    pub distance: Vec<f64>,
    /// `(1/T) int_0^T D(t) dt` by the trapezoidal rule.
    pub time_avg: f64,
}

/// Compares exact and Gaussian maps up to `horizon`.
pub fn gaussian_error(
    exact: &DephasingTrace,
    gauss: &DephasingTrace,
    rho0: &DensityMatrix,
    horizon: f64,
) -> Result<ErrorReport> {
    exact.check_same_grid(gauss)?;
    let points = exact
        .times
        .iter()
        .take_while(|&&t| t <= horizon + 1e-9)
        .count();
    if points < 2 {
        return Err(Error::GridMismatch(format!(
            "horizon {horizon} covers fewer than two grid points"
        )));
    }
    let pointwise: Vec<f64> = exact
        .chi
        .iter()
        .zip(&gauss.chi)
        .map(|(a, b)| (a - b).norm())
        .collect();
    let distance: Vec<f64> = exact
        .chi
        .iter()
        .zip(&gauss.chi)
        .map(|(&a, &b)| trace_distance(&apply_map(rho0, a), &apply_map(rho0, b)))
        .collect();

    let times = &exact.times[..points];
    let integral: f64 = times
        .windows(2)
        .zip(distance.windows(2))
        .map(|(t, d)| 0.5 * (t[1] - t[0]) * (d[0] + d[1]))
        .sum();
    let span = times[points - 1] - times[0];
    Ok(ErrorReport {
        pointwise,
        distance,
        time_avg: integral / span,
    })
}
