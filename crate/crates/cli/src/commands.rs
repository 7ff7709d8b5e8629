//! Subcommand implementations. Each returns the full CSV text.

use std::fmt::Write;

use dephasing_core::bath::{discretize, BathConfig, BathMode};
use dephasing_core::correlation::{build_correlation, mean_field_shift};
use dephasing_core::morse::{bound_energies, x_matrix};
use dephasing_core::observables::{blp_flows, dephasing_time, gaussian_error};
use dephasing_core::oracle::{dense_chi, quadrature_element, MAX_DENSE_MODES};
use dephasing_core::{chi_series, DephasingTrace, MorseParams};
use rayon::prelude::*;

use crate::config::{ConfigError, ExperimentConfig};

/// Sentinel for a dephasing time or backflow ratio that does not exist.
pub const UNDEFINED: f64 = -1.0;

const DENSE_TOLERANCE: f64 = 1e-10;
const QUADRATURE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("(lambda = {lambda}, beta = {beta}, eta = {eta}): {source}")]
    Point {
        lambda: f64,
        beta: f64,
        eta: f64,
        source: dephasing_core::Error,
    },
    #[error(transparent)]
    Core(#[from] dephasing_core::Error),
    #[error("{0}")]
    Failed(String),
}

pub type CliResult<T> = Result<T, CliError>;

/// Twelve significant digits in scientific notation.
pub fn fmt(v: f64) -> String {
    format!("{v:.11e}")
}

fn row(values: &[f64]) -> String {
    values.iter().map(|&v| fmt(v)).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, Copy)]
struct Point {
    lambda: f64,
    beta: f64,
    eta: f64,
}

impl Point {
    fn modes(&self, config: &ExperimentConfig) -> CliResult<Vec<BathMode>> {
        discretize(&BathConfig {
            eta: self.eta,
            omega_c: config.omega_c,
            k_modes: config.k_modes,
            lambda: self.lambda,
            beta: self.beta,
        })
        .map_err(|e| self.wrap(e))
    }

    fn wrap(&self, source: dephasing_core::Error) -> CliError {
        CliError::Point {
            lambda: self.lambda,
            beta: self.beta,
            eta: self.eta,
            source,
        }
    }

    fn traces(&self, config: &ExperimentConfig) -> CliResult<(DephasingTrace, DephasingTrace)> {
        let modes = self.modes(config)?;
        let grid = config.grid();
        let exact = chi_series(&modes, &config.system(), &grid);
        let gauss = build_correlation(&modes).gaussian_series(
            config.omega_s,
            mean_field_shift(&modes),
            &grid,
        );
        Ok((exact, gauss))
    }
}

fn single_point(config: &ExperimentConfig) -> CliResult<Point> {
    let (lambda, beta) = config.single_point()?;
    Ok(Point {
        lambda,
        beta,
        eta: config.eta()?,
    })
}

/// All `(lambda, beta)` pairs, ordered by lambda then beta.
fn sweep_points(config: &ExperimentConfig) -> CliResult<Vec<Point>> {
    let eta = config.eta()?;
    let betas = config.betas()?;
    let mut points: Vec<Point> = config
        .lambdas()?
        .iter()
        .flat_map(|&lambda| betas.iter().map(move |&beta| Point { lambda, beta, eta }))
        .collect();
    points.sort_by(|a, b| {
        a.lambda
            .total_cmp(&b.lambda)
            .then(a.beta.total_cmp(&b.beta))
    });
    Ok(points)
}

fn sweep<T: Send>(
    config: &ExperimentConfig,
    f: impl Fn(&Point) -> CliResult<T> + Sync,
) -> CliResult<Vec<(Point, T)>> {
    sweep_points(config)?
        .into_par_iter()
        .map(|p| f(&p).map(|v| (p, v)))
        .collect()
}

pub fn spectrum(lambda: f64, omega: f64) -> CliResult<String> {
    let params = MorseParams::new(omega, lambda)?;
    let energies = bound_energies(&params);
    let x = x_matrix(lambda)?;
    let mut out = String::from("n,energy\n");
    for (n, e) in energies.iter().enumerate() {
        writeln!(out, "{n},{}", fmt(*e)).unwrap();
    }
    out.push_str("\nn,m,x_element\n");
    for n in 0..x.nrows() {
        for m in n..x.ncols() {
            writeln!(out, "{n},{m},{}", fmt(x[(n, m)])).unwrap();
        }
    }
    Ok(out)
}

pub fn bath(config: &ExperimentConfig) -> CliResult<String> {
    let point = single_point(config)?;
    let mut out = String::from("k,omega_k,g_k,count,mean_b,z_k\n");
    for mode in point.modes(config)? {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            mode.index,
            fmt(mode.omega),
            fmt(mode.coupling),
            mode.dimension(),
            fmt(mode.thermal.mean_b),
            fmt(mode.thermal.partition)
        )
        .unwrap();
    }
    Ok(out)
}

pub fn correlation(config: &ExperimentConfig) -> CliResult<String> {
    let point = single_point(config)?;
    let model = build_correlation(&point.modes(config)?);
    let grid = config.grid();
    let mut out = String::from("t,re_alpha,im_alpha,gamma\n");
    for t in grid.times() {
        let alpha = model.alpha(t);
        writeln!(
            out,
            "{}",
            row(&[t, alpha.re, alpha.im, model.gamma_decay(t)])
        )
        .unwrap();
    }
    let ratio = match model.offset_ratio() {
        Ok(r) => r,
        Err(dephasing_core::Error::ZeroCorrelation(_)) => UNDEFINED,
        Err(e) => return Err(point.wrap(e)),
    };
    out.push_str("\nc0,c_at_0,offset_ratio\n");
    writeln!(out, "{}", row(&[model.offset_c0, model.c_at_zero(), ratio])).unwrap();
    Ok(out)
}

pub fn dynamics(config: &ExperimentConfig) -> CliResult<String> {
    let point = single_point(config)?;
    let (exact, gauss) = point.traces(config)?;
    eprintln!("min |chi| = {}", fmt(exact.min_abs()));
    let mut out = String::from("t,re_chi,im_chi,abs_chi,re_chi_gauss,im_chi_gauss,abs_chi_gauss\n");
    for ((t, chi), g) in exact.times.iter().zip(&exact.chi).zip(&gauss.chi) {
        writeln!(
            out,
            "{}",
            row(&[*t, chi.re, chi.im, chi.norm(), g.re, g.im, g.norm()])
        )
        .unwrap();
    }
    Ok(out)
}

pub fn sweep_dephasing(config: &ExperimentConfig) -> CliResult<String> {
    let rows = sweep(config, |p| {
        let modes = p.modes(config)?;
        let trace = chi_series(&modes, &config.system(), &config.grid());
        let tau = dephasing_time(&trace, &config.rho0, config.threshold).map_err(|e| p.wrap(e))?;
        Ok(tau.unwrap_or(UNDEFINED))
    })?;
    let mut out = String::from("lambda,beta,eta,tau_d\n");
    for (p, tau) in rows {
        writeln!(out, "{}", row(&[p.lambda, p.beta, p.eta, tau])).unwrap();
    }
    Ok(out)
}

pub fn sweep_backflow(config: &ExperimentConfig) -> CliResult<String> {
    let rows = sweep(config, |p| {
        let modes = p.modes(config)?;
        let trace = chi_series(&modes, &config.system(), &config.grid());
        Ok(blp_flows(&trace.abs()))
    })?;
    let mut out = String::from("lambda,beta,eta,n_minus,n_plus,ratio\n");
    for (p, flows) in rows {
        let ratio = flows.ratio.unwrap_or(UNDEFINED);
        writeln!(
            out,
            "{}",
            row(&[p.lambda, p.beta, p.eta, flows.n_minus, flows.n_plus, ratio])
        )
        .unwrap();
    }
    Ok(out)
}

/// Time-averaged error table and the per-time error table.
pub fn gaussian_error_tables(config: &ExperimentConfig) -> CliResult<(String, String)> {
    let horizon = config.horizon.unwrap_or(config.t_max);
    let rows = sweep(config, |p| {
        let (exact, gauss) = p.traces(config)?;
        let report =
            gaussian_error(&exact, &gauss, &config.rho0, horizon).map_err(|e| p.wrap(e))?;
        Ok((exact.times, report))
    })?;
    let mut summary = String::from("lambda,beta,eta,time_avg_error\n");
    let mut pointwise = String::from("lambda,beta,eta,t,e_chi,trace_distance\n");
    for (p, (times, report)) in rows {
        writeln!(
            summary,
            "{}",
            row(&[p.lambda, p.beta, p.eta, report.time_avg])
        )
        .unwrap();
        for ((t, e), d) in times.iter().zip(&report.pointwise).zip(&report.distance) {
            writeln!(pointwise, "{}", row(&[p.lambda, p.beta, p.eta, *t, *e, *d])).unwrap();
        }
    }
    Ok((summary, pointwise))
}

/// Pass/fail table of the brute-force cross-checks; `Err` if any check fails.
pub fn oracle_check(config: &ExperimentConfig) -> CliResult<(String, bool)> {
    if config.k_modes > MAX_DENSE_MODES {
        return Err(CliError::Failed(format!(
            "oracle-check needs k_modes <= {MAX_DENSE_MODES}, got {}",
            config.k_modes
        )));
    }
    let dense = sweep(config, |p| {
        let modes = p.modes(config)?;
        let grid = config.grid();
        let reference = dense_chi(&modes, &config.system(), &grid).map_err(|e| p.wrap(e))?;
        let fast = chi_series(&modes, &config.system(), &grid);
        reference.max_deviation(&fast).map_err(|e| p.wrap(e))
    })?;
    let elements: Vec<(f64, f64)> = config
        .lambdas()?
        .par_iter()
        .map(|&lambda| -> CliResult<(f64, f64)> {
            let closed = x_matrix(lambda)?;
            let mut worst: f64 = 0.0;
            for n in 0..closed.nrows() {
                for m in n..closed.ncols() {
                    worst = worst.max((quadrature_element(lambda, n, m)? - closed[(n, m)]).abs());
                }
            }
            Ok((lambda, worst))
        })
        .collect::<CliResult<_>>()?;

    let mut all_pass = true;
    let mut status = |deviation: f64, tolerance: f64| {
        let pass = deviation < tolerance;
        all_pass &= pass;
        if pass {
            "PASS"
        } else {
            "FAIL"
        }
    };
    let mut out = String::from("check,lambda,beta,max_deviation,tolerance,status\n");
    for (p, deviation) in dense {
        let s = status(deviation, DENSE_TOLERANCE);
        writeln!(
            out,
            "dense_chi,{},{},{},{},{s}",
            fmt(p.lambda),
            fmt(p.beta),
            fmt(deviation),
            fmt(DENSE_TOLERANCE)
        )
        .unwrap();
    }
    for (lambda, deviation) in elements {
        let s = status(deviation, QUADRATURE_TOLERANCE);
        writeln!(
            out,
            "x_elements,{},,{},{},{s}",
            fmt(lambda),
            fmt(deviation),
            fmt(QUADRATURE_TOLERANCE)
        )
        .unwrap();
    }
    Ok((out, all_pass))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap()
    }

    #[test]
    fn float_format_has_twelve_digits() {
        assert_eq!(fmt(2.5), "2.50000000000e0");
        assert_eq!(fmt(-0.000123), "-1.23000000000e-4");
    }

    #[test]
    fn spectrum_blocks() {
        let text = spectrum(2.5, 1.0).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,energy");
        assert_eq!(lines[1], "0,-8.00000000000e-1");
        assert_eq!(lines[2], "1,-2.00000000000e-1");
        assert_eq!(lines[4], "n,m,x_element");
        assert_eq!(lines.len(), 8);
        assert!(lines[6].starts_with("0,1,4.71404520"));
    }

    #[test]
    fn sweep_rows_sorted() {
        let c =
            config("eta = 0.5\nk_modes = 2\nlambda = 2.6, 2.5\nbeta = 10, 1\nt_max = 1\ndt = 0.1");
        let text = sweep_backflow(&c).unwrap();
        let lambdas: Vec<&str> = text.lines().skip(1).map(|l| &l[..15]).collect();
        assert_eq!(lambdas.len(), 4);
        assert!(text
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("2.50000000000e0,1.00000000000e0"));
        assert!(text
            .lines()
            .nth(4)
            .unwrap()
            .starts_with("2.60000000000e0,1.00000000000e1"));
    }

    #[test]
    fn undecayed_sweep_uses_sentinel() {
        let c = config("eta = 0\nk_modes = 2\nlambda = 2.6\nbeta = 1\nt_max = 1\ndt = 0.1");
        let text = sweep_dephasing(&c).unwrap();
        assert!(text.lines().nth(1).unwrap().ends_with(",-1.00000000000e0"));
    }

    #[test]
    fn zero_coupling_offset_ratio_sentinel() {
        let c = config("eta = 0\nk_modes = 2\nlambda = 2.6\nbeta = 1\nt_max = 1\ndt = 0.5");
        let text = correlation(&c).unwrap();
        assert!(text.trim_end().ends_with(",-1.00000000000e0"));
    }

    #[test]
    fn oracle_check_passes_small_bath() {
        let c = config("eta = 2\nk_modes = 2\nlambda = 2.6\nbeta = 1\nt_max = 5\ndt = 0.1");
        let (table, pass) = oracle_check(&c).unwrap();
        assert!(pass, "{table}");
        assert_eq!(table.lines().count(), 3);
    }

    #[test]
    fn oracle_check_rejects_large_bath() {
        let c = config("eta = 2\nlambda = 2.6\nbeta = 1");
        assert!(oracle_check(&c).is_err());
    }

    #[test]
    fn point_errors_name_parameters() {
        let c = config(
            "eta = 2\nk_modes = 2\nlambda = 2.6\nbeta = 1\nthreshold = 0.5\nrho0 = 1, 0, 0, 0",
        );
        let message = sweep_dephasing(&c).unwrap_err().to_string();
        assert!(message.contains("lambda = 2.6"), "{message}");
        assert!(message.contains("eta = 2"), "{message}");
    }
}
