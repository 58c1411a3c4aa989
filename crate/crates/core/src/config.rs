//! Run configuration shared by the `verify` and `export` commands.
//!
//! A config file is TOML; every key is optional:
//!
//! ```toml
//! seed = 42
//! format = "json"            # or "csv"
//! output = "report.json"
//!
//! [grid]                     # radial grid for F-constancy checks
//! min = 0.01
//! max = 0.99
//! steps = 200
//!
//! [samples]
//! monotone = 10000
//! monotone_sizes = [1, 2, 3, 4]
//! actions = 200
//! commutator_points = 50
//! gradient_points = 1000
//!
//! [tolerances]               # upper bounds, looked up by check, then suite, then "all"
//! all = 1e-6
//! "commutators.max_error" = 1e-7
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSettings {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Default for GridSettings {
    fn default() -> Self {
        Self {
            min: 0.01,
            max: 0.99,
            steps: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleSettings {
    pub monotone: usize,
    pub monotone_sizes: Vec<usize>,
    pub actions: usize,
    pub commutator_points: usize,
    pub gradient_points: usize,
}

impl Default for SampleSettings {
    fn default() -> Self {
        Self {
            monotone: 10_000,
            monotone_sizes: vec![1, 2, 3, 4],
            actions: 200,
            commutator_points: 50,
            gradient_points: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub grid: GridSettings,
    pub samples: SampleSettings,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            tolerances: BTreeMap::new(),
            grid: GridSettings::default(),
            samples: SampleSettings::default(),
            format: OutputFormat::Json,
            output: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self =
            toml::from_str(s).map_err(|e| Error::InvalidParameter(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        if !(0.0 < g.min && g.min < g.max && g.max < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "grid needs 0 < min < max < 1, got [{}, {}]",
                g.min, g.max
            )));
        }
        if let Some((k, v)) = self.tolerances.iter().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::InvalidParameter(format!("tolerance {k} = {v}")));
        }
        let s = &self.samples;
        if s.monotone_sizes.is_empty() || s.monotone_sizes.contains(&0) {
            return Err(Error::InvalidParameter(
                "monotone_sizes must be positive".into(),
            ));
        }
        if s.actions == 0 || s.commutator_points == 0 || s.gradient_points == 0 {
            return Err(Error::InvalidParameter(
                "sample counts must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Tolerance for `suite.check`: the check key, then the suite key, then
    /// `all`, then `default`.
    pub fn tolerance(&self, suite: &str, check: &str, default: f64) -> f64 {
        let t = &self.tolerances;
        t.get(&format!("{suite}.{check}"))
            .or_else(|| t.get(suite))
            .or_else(|| t.get("all"))
            .copied()
            .unwrap_or(default)
    }

    pub fn set_all_tolerances(&mut self, tol: f64) {
        self.tolerances.clear();
        self.tolerances.insert("all".into(), tol);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default() {
        assert_eq!(RunConfig::from_toml_str("").unwrap(), RunConfig::default());
    }

    #[test]
    fn parses_documented_example() {
        let cfg = RunConfig::from_toml_str(
            r#"
            seed = 7
            format = "csv"
            [grid]
            steps = 50
            [samples]
            monotone = 100
            [tolerances]
            all = 1e-3
            "commutators.max_error" = 1e-7
            flows = 1e-5
            "#,
        )
        .unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.format, OutputFormat::Csv);
        assert_eq!(cfg.grid.steps, 50);
        assert_eq!(cfg.grid.min, 0.01);
        assert_eq!(cfg.samples.monotone, 100);
        assert_eq!(cfg.samples.actions, 200);
        assert_eq!(cfg.tolerance("commutators", "max_error", 1.0), 1e-7);
        assert_eq!(cfg.tolerance("flows", "bh", 1.0), 1e-5);
        assert_eq!(cfg.tolerance("actions", "bkm", 1.0), 1e-3);
        assert_eq!(RunConfig::default().tolerance("actions", "bkm", 1.0), 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RunConfig::from_toml_str("sed = 1").is_err());
        assert!(RunConfig::from_toml_str("[grid]\nmin = 0.5\nmax = 0.2").is_err());
        assert!(RunConfig::from_toml_str("[tolerances]\nall = -1.0").is_err());
        assert!(RunConfig::from_toml_str("format = \"xml\"").is_err());
    }
}
