//! Flat `key = value` experiment configuration.

use std::path::Path;

use dephasing_core::{DensityMatrix, SystemConfig, TimeGrid};
use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: field `{field}`: {reason}")]
    Field {
        line: usize,
        field: String,
        reason: String,
    },
    #[error("field `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub k_modes: usize,
    pub omega_c: f64,
    pub eta: Option<f64>,
    pub lambda_grid: Vec<f64>,
    pub beta_list: Vec<f64>,
    pub omega_s: f64,
    pub t_max: f64,
    pub dt: f64,
    pub rho0: DensityMatrix,
    /// Coherence fraction defining the dephasing time.
    pub threshold: f64,
    /// Averaging window of the Gaussian error; defaults to `t_max`.
    pub horizon: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            k_modes: 40,
            omega_c: 1.0,
            eta: None,
            lambda_grid: Vec::new(),
            beta_list: Vec::new(),
            omega_s: 2.0,
            t_max: 20.0,
            dt: 0.01,
            rho0: DensityMatrix::default(),
            threshold: 0.1,
            horizon: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut config = Self::default();
        let mut t_max_line = 0;
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let field = |reason: String| ConfigError::Field {
                line,
                field: key.to_string(),
                reason,
            };
            match key {
                "k_modes" => {
                    config.k_modes = value.parse().map_err(|_| {
                        field(format!("expected a positive integer, got `{value}`"))
                    })?;
                    if config.k_modes == 0 {
                        return Err(field("must be at least 1".into()));
                    }
                }
                "omega_c" => config.omega_c = positive(value).map_err(field)?,
                "eta" => {
                    let eta = number(value).map_err(field)?;
                    if eta < 0.0 {
                        return Err(field(format!("must be non-negative, got {eta}")));
                    }
                    config.eta = Some(eta);
                }
                "lambda" | "lambda_grid" => {
                    let grid = number_list(value).map_err(field)?;
                    if let Some(bad) = grid.iter().find(|&&l| l <= 0.5) {
                        return Err(field(format!("entries must exceed 0.5, got {bad}")));
                    }
                    config.lambda_grid = grid;
                }
                "beta" | "beta_list" => {
                    let list = number_list(value).map_err(field)?;
                    if let Some(bad) = list.iter().find(|&&b| b <= 0.0) {
                        return Err(field(format!("entries must be positive, got {bad}")));
                    }
                    config.beta_list = list;
                }
                "omega_s" => config.omega_s = number(value).map_err(field)?,
                "t_max" => {
                    config.t_max = positive(value).map_err(field)?;
                    t_max_line = line;
                }
                "dt" => config.dt = positive(value).map_err(field)?,
                "threshold" => {
                    let threshold = number(value).map_err(field)?;
                    if !(threshold > 0.0 && threshold < 1.0) {
                        return Err(field(format!("must lie in (0, 1), got {threshold}")));
                    }
                    config.threshold = threshold;
                }
                "horizon" => config.horizon = Some(positive(value).map_err(field)?),
                "rho0" => config.rho0 = density_matrix(value).map_err(field)?,
                _ => return Err(field("unknown key".into())),
            }
        }
        if config.dt >= config.t_max {
            return Err(ConfigError::Field {
                line: t_max_line,
                field: "dt".into(),
                reason: format!("must be smaller than t_max = {}", config.t_max),
            });
        }
        if let Some(horizon) = config.horizon {
            if horizon > config.t_max {
                return Err(ConfigError::Invalid {
                    field: "horizon",
                    reason: format!("{horizon} exceeds t_max = {}", config.t_max),
                });
            }
        }
        Ok(config)
    }

    pub fn eta(&self) -> Result<f64, ConfigError> {
        self.eta.ok_or(ConfigError::Invalid {
            field: "eta",
            reason: "required for this subcommand".into(),
        })
    }

    pub fn lambdas(&self) -> Result<&[f64], ConfigError> {
        if self.lambda_grid.is_empty() {
            return Err(ConfigError::Invalid {
                field: "lambda",
                reason: "at least one value required".into(),
            });
        }
        Ok(&self.lambda_grid)
    }

    pub fn betas(&self) -> Result<&[f64], ConfigError> {
        if self.beta_list.is_empty() {
            return Err(ConfigError::Invalid {
                field: "beta",
                reason: "at least one value required".into(),
            });
        }
        Ok(&self.beta_list)
    }

    /// The only `(lambda, beta)` point of the configuration.
    pub fn single_point(&self) -> Result<(f64, f64), ConfigError> {
        let single = |values: &[f64], field| match values {
            [v] => Ok(*v),
            _ => Err(ConfigError::Invalid {
                field,
                reason: format!(
                    "this subcommand needs exactly one value, got {} (use --{field} to pick one)",
                    values.len()
                ),
            }),
        };
        Ok((
            single(self.lambdas()?, "lambda")?,
            single(self.betas()?, "beta")?,
        ))
    }

    pub fn grid(&self) -> TimeGrid {
        TimeGrid::new(self.t_max, self.dt).expect("validated on parse")
    }

    pub fn system(&self) -> SystemConfig {
        SystemConfig {
            omega_s: self.omega_s,
            rho0: self.rho0,
        }
    }
}

fn number(value: &str) -> Result<f64, String> {
    let v: f64 = value
        .parse()
        .map_err(|_| format!("expected a number, got `{value}`"))?;
    if !v.is_finite() {
        return Err(format!("expected a finite number, got `{value}`"));
    }
    Ok(v)
}

fn positive(value: &str) -> Result<f64, String> {
    let v = number(value)?;
    if v <= 0.0 {
        return Err(format!("must be positive, got {v}"));
    }
    Ok(v)
}

/// Comma-separated numbers and `start:stop:step` ranges (inclusive).
pub fn number_list(value: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in value.split(',').map(str::trim) {
        if item.is_empty() {
            return Err("empty list entry".into());
        }
        let parts: Vec<&str> = item.split(':').map(str::trim).collect();
        match parts.as_slice() {
            [single] => out.push(number(single)?),
            [start, stop, step] => out.extend(range(number(start)?, number(stop)?, number(step)?)?),
            _ => {
                return Err(format!(
                    "expected a number or start:stop:step, got `{item}`"
                ))
            }
        }
    }
    Ok(out)
}

fn range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, String> {
    if step <= 0.0 {
        return Err(format!("range step must be positive, got {step}"));
    }
    if stop < start {
        return Err(format!("range stop {stop} is below start {start}"));
    }
    let intervals = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=intervals)
        .map(|i| round_digits(start + i as f64 * step))
        .collect())
}

fn round_digits(v: f64) -> f64 {
    format!("{v:.12e}").parse().expect("formatted float")
}

/// `p_plus, p_minus, re, im` with the coherence `<+|rho|->`.
fn density_matrix(value: &str) -> Result<DensityMatrix, String> {
    let parts = value
        .split(',')
        .map(|p| number(p.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    let [p_plus, p_minus, re, im] = parts[..] else {
        return Err(format!(
            "expected `p_plus, p_minus, re_coherence, im_coherence`, got {} values",
            parts.len()
        ));
    };
    DensityMatrix::from_parts(p_plus, p_minus, Complex64::new(re, im)).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let config = ExperimentConfig::parse("eta = 2\nlambda = 2.5\nbeta = 1").unwrap();
        assert_eq!(config.k_modes, 40);
        assert_eq!(config.omega_c, 1.0);
        assert_eq!(config.omega_s, 2.0);
        assert_eq!(config.t_max, 20.0);
        assert_eq!(config.dt, 0.01);
        assert_eq!(config.threshold, 0.1);
        assert_eq!(config.rho0, DensityMatrix::half_polarized_x());
        assert_eq!(config.single_point().unwrap(), (2.5, 1.0));
    }

    #[test]
    fn ranges_and_lists() {
        let grid = number_list("1.6:7.5:0.1").unwrap();
        assert_eq!(grid.len(), 60);
        assert_eq!(grid[9], 2.5);
        assert_eq!(grid[59], 7.5);
        assert_eq!(
            number_list("1, 4,7 ,10").unwrap(),
            vec![1.0, 4.0, 7.0, 10.0]
        );
        assert_eq!(number_list("1,2:3:0.5").unwrap(), vec![1.0, 2.0, 2.5, 3.0]);
        assert!(number_list("1,,2").is_err());
        assert!(number_list("3:1:0.5").is_err());
        assert!(number_list("1:2").is_err());
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# bath\n\n k_modes = 5  # few modes\neta=0.5\n";
        let config = ExperimentConfig::parse(text).unwrap();
        assert_eq!(config.k_modes, 5);
        assert_eq!(config.eta, Some(0.5));
    }

    #[test]
    fn lambda_below_half_names_field_and_line() {
        let err = ExperimentConfig::parse("eta = 2\nlambda = 1.6, 0.4\n").unwrap_err();
        let message = err.to_string();
        assert!(message.contains("line 2"), "{message}");
        assert!(message.contains("`lambda`"), "{message}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ExperimentConfig::parse("bogus = 1").is_err());
        assert!(ExperimentConfig::parse("eta 2").is_err());
        assert!(ExperimentConfig::parse("dt = 0.5\nt_max = 0.1").is_err());
        assert!(ExperimentConfig::parse("beta = 0").is_err());
        assert!(ExperimentConfig::parse("k_modes = 0").is_err());
        assert!(ExperimentConfig::parse("threshold = 1").is_err());
        assert!(ExperimentConfig::parse("rho0 = 0.5, 0.5, 0.6, 0").is_err());
        assert!(ExperimentConfig::parse("eta = -1").is_err());
    }

    #[test]
    fn custom_state() {
        let config = ExperimentConfig::parse("rho0 = 0.5, 0.5, 0, 0.5").unwrap();
        assert_eq!(config.rho0.coherence(), Complex64::new(0.0, 0.5));
    }

    #[test]
    fn single_point_requires_one_value() {
        let config = ExperimentConfig::parse("lambda = 2.5, 2.6\nbeta = 1").unwrap();
        assert!(config.single_point().is_err());
    }
}
