//! Run configuration: built-in defaults, overridden by a TOML file, overridden by flags.
//! The report directory may also come from `QKZ_REPORT_DIR` (above the file, below `--out`).

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const REPORT_DIR_ENV: &str = "QKZ_REPORT_DIR";

/// Default tolerance per check family.
pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("ybe", 1e-10),
    ("r0-reflection", 1e-10),
    ("unitarity", 1e-9),
    ("qg-invariance", 1e-10),
    ("qg-s3", 1e-12),
    ("qg-negative-control", 0.1),
    ("spectrum", 1e-8),
    ("riemann", 1e-6),
    ("psi", 1e-8),
    ("chi-series", 1e-8),
    ("chi-log-derivative", 1e-7),
    ("dispersion", 1e-8),
    ("genus1", 1e-8),
    ("legendre", 1e-10),
    ("bilinear", 1e-8),
    ("classical-limit", 0.05),
    ("qkz", 1e-8),
    ("correlator", 1e-8),
];

/// Values as read from a file or flags; unset fields fall through.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub seed: Option<u64>,
    pub nu: Option<Vec<f64>>,
    pub n: Option<Vec<usize>>,
    pub samples: Option<usize>,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub quadrature: QuadratureOverrides,
    pub q_table: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureOverrides {
    /// contour clearance as a fraction of the minimal branch-point separation
    pub period_clearance: Option<f64>,
    /// δ ladder for specialization limits
    pub deltas: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    /// None: each suite uses its own default list
    pub nu: Option<Vec<f64>>,
    pub n: Option<Vec<usize>>,
    pub samples: Option<usize>,
    pub output: PathBuf,
    pub tolerances: BTreeMap<String, f64>,
    pub quadrature: QuadratureOverrides,
    pub q_table: Option<PathBuf>,
}

#[derive(Debug, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            nu: None,
            n: None,
            samples: None,
            output: PathBuf::from("reports"),
            tolerances: DEFAULT_TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            quadrature: QuadratureOverrides::default(),
            q_table: None,
        }
    }
}

impl RunConfig {
    pub fn tol(&self, family: &str) -> f64 {
        self.tolerances[family]
    }

    pub fn nus(&self, default: &[f64]) -> Vec<f64> {
        self.nu.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn ns(&self, default: &[usize]) -> Vec<usize> {
        self.n.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn samples_or(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }

    fn apply(&mut self, p: PartialConfig) -> Result<(), ConfigError> {
        for (k, v) in p.tolerances {
            if !self.tolerances.contains_key(&k) {
                return Err(ConfigError(format!("unknown tolerance key `{k}`")));
            }
            if !(v >= 0.0 && v.is_finite()) {
                return Err(ConfigError(format!("tolerance `{k}` must be a finite non-negative number")));
            }
            self.tolerances.insert(k, v);
        }
        if let Some(s) = p.seed {
            self.seed = s;
        }
        if let Some(v) = p.nu {
            if v.is_empty() || v.iter().any(|x| !(*x > 0.0 && *x < 1.0)) {
                return Err(ConfigError(format!("nu values must lie in (0, 1): {v:?}")));
            }
            self.nu = Some(v);
        }
        if let Some(v) = p.n {
            if v.is_empty() || v.contains(&0) {
                return Err(ConfigError(format!("n values must be positive: {v:?}")));
            }
            self.n = Some(v);
        }
        if let Some(s) = p.samples {
            if s == 0 {
                return Err(ConfigError("samples must be positive".into()));
            }
            self.samples = Some(s);
        }
        if let Some(o) = p.output {
            self.output = o;
        }
        if let Some(c) = p.quadrature.period_clearance {
            if !(c > 0.0 && c < 0.25) {
                return Err(ConfigError("period_clearance must lie in (0, 0.25)".into()));
            }
            self.quadrature.period_clearance = Some(c);
        }
        if let Some(d) = p.quadrature.deltas {
            self.quadrature.deltas = Some(d);
        }
        if let Some(q) = p.q_table {
            self.q_table = Some(q);
        }
        Ok(())
    }

    /// defaults < file < environment (report directory only) < flags
    pub fn resolve(file: Option<&Path>, env_dir: Option<String>, flags: PartialConfig) -> Result<Self, ConfigError> {
        let mut c = Self::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
            c.apply(parse_toml(&text)?)?;
        }
        if let Some(d) = env_dir.filter(|d| !d.is_empty()) {
            c.output = PathBuf::from(d);
        }
        c.apply(flags)?;
        Ok(c)
    }
}

pub fn parse_toml(text: &str) -> Result<PartialConfig, ConfigError> {
    toml::from_str(text).map_err(|e| ConfigError(format!("malformed config: {e}")))
}

/// "2..10" (inclusive), "2,3,5" or "4".
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| format!("bad range start in `{s}`"))?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| format!("bad range end in `{s}`"))?;
        if a > b {
            return Err(format!("empty range `{s}`"));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| format!("bad integer `{x}`"))).collect()
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|x| x.trim().parse().map_err(|_| format!("bad number `{x}`"))).collect()
}

/// "name=value"
pub fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    Ok((k.trim().to_string(), v.trim().parse().map_err(|_| format!("bad tolerance value `{v}`"))?))
}
