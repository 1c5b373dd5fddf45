//! Scenario configuration: flat key=value text with `#` comments, mirrored
//! one-to-one by the CLI flags (flags override file values).

use std::path::PathBuf;

use thiserror::Error;

use crate::entanglement::StateKind;
use crate::kernels::SystemParams;
use crate::sweep::Engine;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown config key '{key}'")]
    UnknownKey { key: String },
    #[error("bad value for '{key}': {detail}")]
    BadValue { key: String, detail: String },
    #[error("line {line} is not a key=value pair: '{text}'")]
    BadLine { line: usize, text: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub kind: StateKind,
    pub beta_sq: Vec<f64>,
    pub phase: f64,
    /// Atomic frequency ω₀ in units of g.
    pub omega0: f64,
    /// Detuning δ = ω₀ − ω in units of g.
    pub delta: f64,
    pub gt_max: f64,
    pub gt_step: f64,
    pub engine: Engine,
    /// Second engine for a joined cross-check dataset.
    pub cross_check: Option<Engine>,
    /// Fock truncation for the rabi engine.
    pub n_cut: usize,
    pub out: Option<PathBuf>,
    pub revival_threshold: f64,
    pub zero_threshold: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            kind: StateKind::Phi,
            beta_sq: vec![0.5],
            phase: 0.0,
            omega0: 1.5,
            delta: 0.0,
            gt_max: 25.0,
            gt_step: 0.01,
            engine: Engine::TclAlgebraic,
            cross_check: None,
            n_cut: 40,
            out: None,
            revival_threshold: 1e-3,
            zero_threshold: 1e-6,
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    value.trim().parse().map_err(|_| ConfigError::BadValue {
        key: key.to_string(),
        detail: format!("'{value}' is not a number"),
    })
}

/// β² values: a single number, a comma list, or an inclusive range
/// `start:stop:step`.
pub fn parse_beta_grid(value: &str) -> Result<Vec<f64>, ConfigError> {
    let key = "beta-sq";
    let bad = |detail: String| ConfigError::BadValue { key: key.into(), detail };
    let grid: Vec<f64> = if value.contains(':') {
        let parts: Vec<&str> = value.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(format!("range spec '{value}' must be start:stop:step")));
        }
        let start = parse_f64(key, parts[0])?;
        let stop = parse_f64(key, parts[1])?;
        let step = parse_f64(key, parts[2])?;
        if !(step > 0.0) || stop < start {
            return Err(bad("range requires step > 0 and stop >= start".into()));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        (0..=n).map(|i| start + i as f64 * step).collect()
    } else {
        value
            .split(',')
            .map(|v| parse_f64(key, v))
            .collect::<Result<_, _>>()?
    };
    if grid.is_empty() {
        return Err(bad("empty grid".into()));
    }
    if grid.iter().any(|&b| !(b > 0.0 && b < 1.0)) {
        return Err(bad("every beta^2 must lie strictly inside (0, 1)".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad("grid must be strictly ascending".into()));
    }
    Ok(grid)
}

impl ScenarioConfig {
    /// Apply one key=value setting; keys match the CLI flag names.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "state" => {
                self.kind = value
                    .parse()
                    .map_err(|e: String| ConfigError::BadValue { key: key.into(), detail: e })?;
            }
            "beta-sq" => self.beta_sq = parse_beta_grid(value)?,
            "phase" => self.phase = parse_f64(key, value)?,
            "omega0" => self.omega0 = parse_f64(key, value)?,
            "delta" => self.delta = parse_f64(key, value)?,
            "gt-max" => self.gt_max = parse_f64(key, value)?,
            "gt-step" => self.gt_step = parse_f64(key, value)?,
            "engine" => {
                self.engine = value
                    .parse()
                    .map_err(|e: String| ConfigError::BadValue { key: key.into(), detail: e })?;
            }
            "cross-check" => {
                self.cross_check = Some(
                    value
                        .parse()
                        .map_err(|e: String| ConfigError::BadValue { key: key.into(), detail: e })?,
                );
            }
            "n-cut" => {
                self.n_cut = value.parse().map_err(|_| ConfigError::BadValue {
                    key: key.into(),
                    detail: format!("'{value}' is not a positive integer"),
                })?;
            }
            "out" => self.out = Some(PathBuf::from(value)),
            "revival-threshold" => self.revival_threshold = parse_f64(key, value)?,
            "zero-threshold" => self.zero_threshold = parse_f64(key, value)?,
            other => return Err(ConfigError::UnknownKey { key: other.to_string() }),
        }
        Ok(())
    }

    /// Parse a config file body (key=value lines, `#` comments, blank lines
    /// ignored) on top of the defaults.
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.merge_text(text)?;
        Ok(cfg)
    }

    pub fn merge_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::BadLine { line: idx + 1, text: raw.to_string() });
            };
            self.apply(key.trim(), value)?;
        }
        Ok(())
    }

    /// Physical parameters for the run (frequencies in units of g, g = 1).
    pub fn params(&self) -> Result<SystemParams, ConfigError> {
        SystemParams::detuned(self.omega0, self.delta)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Uniform gt grid from 0 to gt-max.
    pub fn gt_grid(&self) -> Vec<f64> {
        let n = (self.gt_max / self.gt_step + 1e-9).floor() as usize;
        (0..=n).map(|i| i as f64 * self.gt_step).collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.gt_step > 0.0) || !(self.gt_max >= self.gt_step) {
            return Err(ConfigError::Invalid(
                "gt-step must be positive and gt-max at least one step".into(),
            ));
        }
        if !(self.revival_threshold > 0.0) || !(self.zero_threshold > 0.0) {
            return Err(ConfigError::Invalid("thresholds must be positive".into()));
        }
        if self.beta_sq.is_empty() {
            return Err(ConfigError::Invalid("beta-sq grid is empty".into()));
        }
        if (self.engine == Engine::Rabi || self.cross_check == Some(Engine::Rabi)) && self.n_cut < 8 {
            return Err(ConfigError::Invalid("n-cut must be at least 8 for the rabi engine".into()));
        }
        self.params().map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let text = "\
# scenario
state = psi
beta-sq = 0.1:0.9:0.2
omega0 = 10   # units of g
delta = 1.0
engine = tcl_direct
gt-max = 12.5
gt-step = 0.05
out = run.csv
";
        let cfg = ScenarioConfig::from_text(text).unwrap();
        assert_eq!(cfg.kind, StateKind::Psi);
        assert_eq!(cfg.beta_sq.len(), 5);
        assert!((cfg.beta_sq[4] - 0.9).abs() < 1e-12);
        assert_eq!(cfg.engine, Engine::TclDirect);
        assert_eq!(cfg.out.as_deref(), Some(std::path::Path::new("run.csv")));
        cfg.validate().unwrap();
        let grid = cfg.gt_grid();
        assert_eq!(grid.len(), 251);
        assert_eq!(*grid.last().unwrap(), 12.5);
    }

    #[test]
    fn beta_grid_forms() {
        assert_eq!(parse_beta_grid("0.5").unwrap(), vec![0.5]);
        assert_eq!(parse_beta_grid("0.1,0.3,0.7").unwrap(), vec![0.1, 0.3, 0.7]);
        assert_eq!(parse_beta_grid("0.2:0.6:0.2").unwrap().len(), 3);
        assert!(parse_beta_grid("0.0,0.5").is_err());
        assert!(parse_beta_grid("0.5,0.4").is_err());
        assert!(parse_beta_grid("1.0").is_err());
        assert!(parse_beta_grid("a").is_err());
    }

    #[test]
    fn unknown_key_is_named() {
        let err = ScenarioConfig::from_text("omega = 3\n").unwrap_err();
        match err {
            ConfigError::UnknownKey { key } => assert_eq!(key, "omega"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_line_reports_position() {
        let err = ScenarioConfig::from_text("state = phi\nnot a pair\n").unwrap_err();
        assert!(matches!(err, ConfigError::BadLine { line: 2, .. }));
    }

    #[test]
    fn validation_rejects_nonphysical_cavity() {
        let mut cfg = ScenarioConfig::default();
        cfg.omega0 = 1.0;
        cfg.delta = 2.0; // omega would be negative
        assert!(cfg.validate().is_err());
    }
}
