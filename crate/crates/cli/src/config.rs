//! Run configuration: defaults, an optional `key=value` file, then flags.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: expected `key=value`")]
    Syntax { path: PathBuf, line: usize },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {msg}")]
    Value { key: String, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub theta: f64,
    pub alpha_grid: Vec<f64>,
    pub p_grid: Vec<f64>,
    pub seed: u64,
    pub samples: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub format: Format,
    /// Entries of the config file, echoed verbatim.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub file: BTreeMap<String, String>,
}

pub const KEYS: [&str; 7] = ["theta", "alpha-grid", "p-grid", "seed", "samples", "out", "format"];

impl RunConfig {
    pub fn defaults(samples: u64) -> Self {
        RunConfig {
            theta: PI / 8.0,
            alpha_grid: (0..=4).map(|k| k as f64 * PI / 16.0).collect(),
            p_grid: (0..=10).map(|k| k as f64 / 10.0).collect(),
            seed: 0,
            samples,
            out: None,
            format: Format::Csv,
            file: BTreeMap::new(),
        }
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |msg: String| ConfigError::Value {
            key: key.to_string(),
            msg,
        };
        match key {
            "theta" => self.theta = parse_angle(value).map_err(bad)?,
            "alpha-grid" => self.alpha_grid = parse_grid(value).map_err(bad)?,
            "p-grid" => self.p_grid = parse_grid(value).map_err(bad)?,
            "seed" => self.seed = value.trim().parse().map_err(|e| bad(format!("{e}")))?,
            "samples" => self.samples = value.trim().parse().map_err(|e| bad(format!("{e}")))?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "format" => {
                self.format = match value.trim() {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    other => return Err(bad(format!("`{other}` is not csv or json"))),
                }
            }
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Reads a config file: one `key=value` per line, `#` comments.
    pub fn load_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                path: path.to_path_buf(),
                line: i + 1,
            })?;
            let (k, v) = (k.trim(), v.trim());
            self.set(k, v)?;
            self.file.insert(k.to_string(), v.to_string());
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, msg: &str| ConfigError::Value {
            key: key.to_string(),
            msg: msg.to_string(),
        };
        if !(self.theta > 0.0 && self.theta <= PI / 8.0 + 1e-12) {
            return Err(bad("theta", "must lie in (0, pi/8]"));
        }
        if self.alpha_grid.is_empty() {
            return Err(bad("alpha-grid", "empty grid"));
        }
        if self.alpha_grid.iter().any(|a| !(0.0..=PI / 4.0 + 1e-12).contains(a)) {
            return Err(bad("alpha-grid", "values must lie in [0, pi/4]"));
        }
        if self.p_grid.is_empty() {
            return Err(bad("p-grid", "empty grid"));
        }
        if self.p_grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(bad("p-grid", "values must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// A number, or a multiple of pi such as `pi/8`, `3pi/16`, `3*pi/16`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let Some(idx) = s.find("pi") else {
        return s.parse::<f64>().map_err(|e| format!("`{s}`: {e}"));
    };
    let coef = s[..idx].trim().trim_end_matches('*').trim();
    let rest = s[idx + 2..].trim();
    let c = if coef.is_empty() {
        1.0
    } else {
        coef.parse::<f64>().map_err(|e| format!("`{s}`: {e}"))?
    };
    let d = if rest.is_empty() {
        1.0
    } else {
        rest.strip_prefix('/')
            .ok_or_else(|| format!("`{s}`: expected `/` after pi"))?
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("`{s}`: {e}"))?
    };
    Ok(c * PI / d)
}

/// Comma-separated values accepted by [`parse_angle`].
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let v = s
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(parse_angle)
        .collect::<Result<Vec<_>, _>>()?;
    if v.is_empty() {
        return Err("empty grid".into());
    }
    Ok(v)
}
