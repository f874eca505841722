use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable naming a `key=value` file with series defaults.
pub const SERIES_CONFIG_ENV: &str = "SYNCAP_SERIES_CONFIG";

/// Truncation controls for every infinite series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    /// Geometric tail mass below which a series is cut.
    pub tail_epsilon: f64,
    /// Hard cap on the run-length truncation point.
    pub r_max_cap: usize,
    /// Hard cap on the deleted-run-count truncation point.
    pub k_max_cap: usize,
    /// Multiplier on the truncation points derived from `tail_epsilon`.
    pub truncation_factor: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            tail_epsilon: 1e-12,
            r_max_cap: 10_000,
            k_max_cap: 100_000,
            truncation_factor: 1,
        }
    }
}

impl SeriesConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tail_epsilon > 0.0 && self.tail_epsilon < 1.0) {
            return Err(Error::Config(format!(
                "tail_epsilon must lie in (0, 1), got {}",
                self.tail_epsilon
            )));
        }
        if self.r_max_cap == 0 || self.k_max_cap == 0 || self.truncation_factor == 0 {
            return Err(Error::Config("caps and truncation_factor must be positive".into()));
        }
        Ok(())
    }

    /// Twice the truncation depth and half the tail budget.
    pub fn refined(&self) -> Self {
        Self {
            tail_epsilon: self.tail_epsilon / 2.0,
            r_max_cap: self.r_max_cap * 2,
            k_max_cap: self.k_max_cap * 2,
            truncation_factor: self.truncation_factor * 2,
        }
    }

    /// Number of run lengths kept for a geometric law with ratio `gamma`.
    pub fn run_cutoff(&self, gamma: f64) -> usize {
        self.cutoff(gamma, self.r_max_cap).max(1)
    }

    /// Index of the last deleted-run count kept for ratio `theta`.
    pub fn count_cutoff(&self, theta: f64) -> usize {
        self.cutoff(theta, self.k_max_cap)
    }

    fn cutoff(&self, ratio: f64, cap: usize) -> usize {
        if ratio <= 0.0 {
            return 0;
        }
        if ratio >= 1.0 {
            return cap;
        }
        let base = (self.tail_epsilon.ln() / ratio.ln()).ceil();
        let scaled = base * self.truncation_factor as f64;
        if scaled >= cap as f64 {
            cap
        } else {
            scaled as usize
        }
    }

    /// Parses `key=value` lines; `#` starts a comment. Unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |e: &dyn std::fmt::Display| Error::Config(format!("line {}: {key}: {e}", lineno + 1));
            match key {
                "tail_epsilon" => cfg.tail_epsilon = value.parse().map_err(|e| bad(&e))?,
                "r_max_cap" => cfg.r_max_cap = value.parse().map_err(|e| bad(&e))?,
                "k_max_cap" => cfg.k_max_cap = value.parse().map_err(|e| bad(&e))?,
                "truncation_factor" => cfg.truncation_factor = value.parse().map_err(|e| bad(&e))?,
                other => return Err(Error::Config(format!("line {}: unknown key {other}", lineno + 1))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Reads the file named by [`SERIES_CONFIG_ENV`], or the defaults when
    /// the variable is unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(SERIES_CONFIG_ENV) {
            Some(path) if !path.is_empty() => Self::from_file(Path::new(&path)),
            _ => Ok(Self::default()),
        }
    }
}
