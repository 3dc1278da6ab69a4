//! Run configuration: flat `key = value` pairs grouped in one section per
//! module.
//!
//! ```toml
//! [construction]
//! n = 4
//! permutation = [1, 3, 2, 4]
//!
//! [invariants]
//! grid = [16, 24, 32, 48, 64, 96, 128, 192, 256]
//! ```
//!
//! Missing keys take their defaults; unknown keys are errors.

use serde::{Deserialize, Serialize};

use crate::construction::SchemeConfig;
use crate::error::{Error, Result};
use crate::invariants::{DEFAULT_GRID, DEFAULT_TERMS};

/// Settings of the invariant comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InvariantSettings {
    /// Polygon sizes sampled for the expansion fit.
    pub grid: Vec<usize>,
    /// Number of `n^{-2k}` terms in the fit.
    pub terms: usize,
}

impl Default for InvariantSettings {
    fn default() -> Self {
        Self { grid: DEFAULT_GRID.to_vec(), terms: DEFAULT_TERMS }
    }
}

/// Settings of the glancing-orbit harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GlancingSettings {
    /// Launch values of `y`; each orbit runs for `⌈1/y0⌉` bounces.
    pub y0: Vec<f64>,
    /// Launch points per `y0`.
    pub launches: usize,
}

impl Default for GlancingSettings {
    fn default() -> Self {
        Self {
            y0: [20u32, 30, 45, 70, 100, 140, 200].iter().map(|&n| 1.0 / n as f64).collect(),
            launches: crate::lazutkin::LAUNCH_POINTS,
        }
    }
}

/// Complete configuration of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub construction: SchemeConfig,
    pub invariants: InvariantSettings,
    pub lazutkin: GlancingSettings,
}

impl RunConfig {
    /// Multiplies every matching tolerance by `scale`.
    pub fn scale_tolerances(&mut self, scale: f64) {
        self.construction.match_tol *= scale;
        self.construction.reverify_tol *= scale;
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable")
    }
}

/// Parses and validates a configuration; errors carry the 1-based line.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|sp| text[..sp.start.min(text.len())].matches('\n').count() + 1).unwrap_or(0);
        Error::Parse { line, message: e.message().to_string() }
    })?;
    cfg.construction.validate()?;
    if cfg.invariants.grid.len() < cfg.invariants.terms + 3 {
        return Err(Error::Config(format!(
            "invariants.grid needs at least terms + 3 = {} sizes",
            cfg.invariants.terms + 3
        )));
    }
    if cfg.lazutkin.launches == 0 || cfg.lazutkin.y0.iter().any(|&y| !(y > 0.0 && y <= 0.05)) {
        return Err(Error::Config("lazutkin.y0 values must lie in (0, 0.05] with launches >= 1".into()));
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_is_default() {
        assert_eq!(parse_config("").unwrap(), RunConfig::default());
    }

    #[test]
    fn round_trip_through_toml() {
        let cfg = RunConfig::default();
        assert_eq!(parse_config(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn unknown_key_reports_line_and_key() {
        let err = parse_config("[construction]\nn = 4\nepsilom = 0.1\n").unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("epsilom"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rotation_permutation_is_rejected() {
        let err = parse_config("[construction]\npermutation = [2, 3, 4, 1]\n").unwrap_err();
        assert!(matches!(err, Error::InvalidPermutation(ref m) if m.contains("rotation")), "{err:?}");
    }
}
