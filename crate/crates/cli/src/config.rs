//! Suite configuration files (TOML or JSON).

use calib_core::subgeom::ImmersionSpec;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// Errors raised while reading or validating a configuration. These map to
/// exit status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// 1-based line of the offending input, when known.
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        Self { line: None, message: message.into() }
    }

    fn at(line: usize, message: impl Into<String>) -> Self {
        Self { line: Some(line), message: message.into() }
    }
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(l) => write!(f, "config error at line {l}: {}", self.message),
            None => write!(f, "config error: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationConfig {
    pub name: String,
    #[serde(default)]
    pub params: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    /// Radial (or per-axis) node count.
    pub nr: usize,
    /// Angular node count.
    pub nt: usize,
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self { nr: 65, nt: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CmcCase {
    pub m: usize,
    pub c: f64,
}

/// Everything a suite run depends on. Unset fields take suite defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: String,
    #[serde(default)]
    pub seed: u64,
    /// Overrides the per-suite random sample count.
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub immersion: Option<ImmersionSpec>,
    #[serde(default)]
    pub calibration: Option<CalibrationConfig>,
    #[serde(default)]
    pub mesh: MeshConfig,
    /// Tolerance overrides keyed by check id or check-id prefix; the longest
    /// matching key wins.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub cmc: Option<Vec<CmcCase>>,
    #[serde(default)]
    pub quat_n: Option<Vec<usize>>,
    /// Finite-difference step of the Laplacian checks.
    #[serde(default)]
    pub step: Option<f64>,
}

impl SuiteConfig {
    pub fn new(suite: &str, seed: u64) -> Self {
        Self {
            suite: suite.into(),
            seed,
            samples: None,
            immersion: None,
            calibration: None,
            mesh: MeshConfig::default(),
            tolerances: BTreeMap::new(),
            cmc: None,
            quat_n: None,
            step: None,
        }
    }

    /// Parses JSON when the text starts with `{`, TOML otherwise.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: SuiteConfig = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| ConfigError::at(e.line(), e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| {
                let line = e.span().map(|s| line_of(text, s.start));
                ConfigError { line, message: e.message().to_string() }
            })?
        };
        cfg.validate_with_lines(text)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.validate_with_lines("")
    }

    fn validate_with_lines(&self, text: &str) -> Result<(), ConfigError> {
        let locate = |key: &str, message: String| match find_key_line(text, key) {
            Some(l) => ConfigError::at(l, message),
            None => ConfigError::new(message),
        };
        if !crate::suites::SUITES.contains(&self.suite.as_str()) {
            return Err(locate(
                "suite",
                format!("unknown suite '{}'; expected one of {}", self.suite, crate::suites::SUITES.join(", ")),
            ));
        }
        for (k, v) in &self.tolerances {
            if !(v.is_finite() && *v >= 0.0) {
                return Err(locate(k, format!("tolerance '{k}' must be finite and nonnegative, got {v}")));
            }
        }
        if let Some(s) = self.step {
            if !(s.is_finite() && s > 0.0) {
                return Err(locate("step", format!("step must be positive, got {s}")));
            }
        }
        if self.samples == Some(0) {
            return Err(locate("samples", "samples must be positive".into()));
        }
        if self.mesh.nr < 3 || self.mesh.nt < 4 {
            return Err(locate("nr", "mesh needs nr >= 3 and nt >= 4".into()));
        }
        if let Some(cases) = &self.cmc {
            for c in cases {
                if c.m < 2 || !c.c.is_finite() {
                    return Err(locate("cmc", format!("invalid CMC case m = {}, c = {}", c.m, c.c)));
                }
            }
        }
        if let Some(ns) = &self.quat_n {
            if ns.iter().any(|&n| n == 0 || n > 4) {
                return Err(locate("quat_n", "quat_n entries must lie in 1..=4".into()));
            }
        }
        Ok(())
    }

    /// Tolerance for `check_id`, overridden by the longest matching key.
    pub fn tolerance(&self, check_id: &str, default: f64) -> f64 {
        self.tolerances
            .iter()
            .filter(|(k, _)| check_id.starts_with(k.as_str()))
            .max_by_key(|(k, _)| k.len())
            .map_or(default, |(_, v)| *v)
    }

    pub fn samples_or(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// First line mentioning `key` as a key (TOML `key =` or JSON `"key":`).
fn find_key_line(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let t = l.trim_start();
        let bare = t.strip_prefix('"').unwrap_or(t);
        bare.strip_prefix(key)
            .map(|rest| {
                let rest = rest.strip_prefix('"').unwrap_or(rest).trim_start();
                rest.starts_with('=') || rest.starts_with(':')
            })
            .unwrap_or(false)
    })
    .map(|i| i + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_and_json_agree() {
        let t = SuiteConfig::parse("suite = \"cmc-hyperbolic\"\nseed = 3\n[[cmc]]\nm = 2\nc = 1.0\n").unwrap();
        let j = SuiteConfig::parse(r#"{"suite": "cmc-hyperbolic", "seed": 3, "cmc": [{"m": 2, "c": 1.0}]}"#).unwrap();
        assert_eq!(t, j);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = SuiteConfig::parse("suite = \"cmc-hyperbolic\"\nseed = \"x\"\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        let e = SuiteConfig::parse("{\n\"suite\": \"cmc-hyperbolic\",\n\"seed\": -1\n}").unwrap_err();
        assert_eq!(e.line, Some(3));
        let e = SuiteConfig::parse("seed = 1\nsuite = \"nope\"\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        let e = SuiteConfig::parse("suite = \"cmc-hyperbolic\"\n[tolerances]\n\"cmc.residual\" = -1.0\n").unwrap_err();
        assert_eq!(e.line, Some(3));
    }

    #[test]
    fn longest_prefix_wins() {
        let mut c = SuiteConfig::new("cmc-hyperbolic", 0);
        c.tolerances.insert("cmc".into(), 1.0);
        c.tolerances.insert("cmc.residual".into(), 0.0);
        assert_eq!(c.tolerance("cmc.residual.m2", 5.0), 0.0);
        assert_eq!(c.tolerance("cmc.angle", 5.0), 1.0);
        assert_eq!(c.tolerance("other", 5.0), 5.0);
    }
}
