//! Run configuration: ladder bounds, amplification policy, cost toggles, and
//! report format, loadable from a TOML file and overridable from the CLI.

use crate::chain::{AmplifierPolicy, ChainModel};
use crate::cost::{CellLibrary, ClockMode, CostOptions, DEFAULT_CLOCK_ARITY};
use crate::ladder::{build_ladder, RankLadder};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config {path}: {msg}")]
    Parse { path: PathBuf, msg: String },
    #[error("config field {field}: {msg}")]
    Invalid { field: String, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Csv,
    #[default]
    Md,
    Json,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "i_min_uA")]
    pub i_min_ua: f64,
    #[serde(rename = "i_max_uA")]
    pub i_max_ua: f64,
    /// Rank step ratio of the ladder.
    pub p_r: f64,
    /// Amplification step ratio inside a JTL (√2 or 2).
    pub p_a: f64,
    pub chain_model: ChainModel,
    /// Relative rung-match tolerance, percent.
    pub rounding_pct: f64,
    /// Primary-output reads count as net sinks.
    pub count_output_taps: bool,
    /// Count the daisy-chain forwarding tap when seeding the widest stage.
    pub count_forward_tap: bool,
    /// Count DC-to-SFQ converters at primary inputs as clock sinks.
    pub clock_input_converters: bool,
    pub clock_mode: ClockMode,
    /// Per-stage fan-out of the clock tree.
    pub clock_arity: u32,
    /// Cell-library TOML path; bundled calibration data when unset.
    pub cell_library: Option<PathBuf>,
    /// Default corpus directory for `bench`.
    pub corpus_dir: Option<PathBuf>,
    pub format: ReportFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            i_min_ua: 46.0,
            i_max_ua: 500.0,
            p_r: std::f64::consts::SQRT_2,
            p_a: std::f64::consts::SQRT_2,
            chain_model: ChainModel::Gap,
            rounding_pct: 2.0,
            count_output_taps: true,
            count_forward_tap: true,
            clock_input_converters: false,
            clock_mode: ClockMode::RightSized,
            clock_arity: DEFAULT_CLOCK_ARITY,
            cell_library: None,
            corpus_dir: None,
            format: ReportFormat::Md,
        }
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let config: RunConfig = toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
        config.validated()
    }

    pub fn validated(self) -> Result<Self, ConfigError> {
        if !self.i_min_ua.is_finite() || self.i_min_ua <= 0.0 || self.i_min_ua > self.i_max_ua {
            return Err(ConfigError::Invalid {
                field: "i_min_uA/i_max_uA".into(),
                msg: format!(
                    "need 0 < i_min <= i_max, got {}..{}",
                    self.i_min_ua, self.i_max_ua
                ),
            });
        }
        if !self.p_r.is_finite() || self.p_r <= 1.0 {
            return Err(ConfigError::Invalid {
                field: "p_r".into(),
                msg: format!("step ratio must exceed 1, got {}", self.p_r),
            });
        }
        if self.intra_step_ranks() < 1 {
            return Err(ConfigError::Invalid {
                field: "p_a".into(),
                msg: format!("amplification step {} below one ladder rank", self.p_a),
            });
        }
        if self.clock_arity < 2 {
            return Err(ConfigError::Invalid {
                field: "clock_arity".into(),
                msg: "clock arity must be at least 2".into(),
            });
        }
        if !self.rounding_pct.is_finite() || self.rounding_pct <= 0.0 {
            return Err(ConfigError::Invalid {
                field: "rounding_pct".into(),
                msg: "tolerance must be positive".into(),
            });
        }
        Ok(self)
    }

    /// Ranks climbed inside one JTL for the configured `p_a` on the `p_r` grid.
    pub fn intra_step_ranks(&self) -> u32 {
        (self.p_a.ln() / self.p_r.ln()).round() as u32
    }

    pub fn ladder(&self) -> Result<RankLadder, crate::ladder::LadderError> {
        build_ladder(self.i_min_ua, self.i_max_ua, self.p_r, self.rounding_pct)
    }

    pub fn policy(&self) -> AmplifierPolicy {
        AmplifierPolicy {
            intra_step_ranks: self.intra_step_ranks(),
            inter_gap_ranks: 1,
            jjs_per_jtl: 2,
            chain_model: self.chain_model,
        }
    }

    pub fn cost_options(&self) -> CostOptions {
        CostOptions {
            count_output_taps: self.count_output_taps,
            clock_mode: self.clock_mode,
            clock_arity: self.clock_arity,
            clock_input_converters: self.clock_input_converters,
        }
    }

    pub fn cell_library(&self) -> Result<CellLibrary, ConfigError> {
        match &self.cell_library {
            None => Ok(CellLibrary::default()),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
                    path: path.clone(),
                    source,
                })?;
                CellLibrary::from_toml_str(&text).map_err(|e| ConfigError::Parse {
                    path: path.clone(),
                    msg: e.to_string(),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_stock_setup() {
        let config = RunConfig::default().validated().unwrap();
        let ladder = config.ladder().unwrap();
        assert_eq!(ladder.len(), 8);
        assert_eq!(config.intra_step_ranks(), 1);
        assert_eq!(config.policy().chain_model, ChainModel::Gap);
    }

    #[test]
    fn step2_config() {
        let config = RunConfig {
            p_a: 2.0,
            ..RunConfig::default()
        };
        assert_eq!(config.intra_step_ranks(), 2);
    }

    #[test]
    fn toml_round_trip_with_spec_keys() {
        let text = r#"
            i_min_uA = 46.0
            i_max_uA = 500.0
            p_r = 1.4142135623730951
            p_a = 2.0
            chain_model = "eq2"
            rounding_pct = 2.0
        "#;
        let config: RunConfig = toml::from_str(text).unwrap();
        let config = config.validated().unwrap();
        assert_eq!(config.chain_model, ChainModel::Eq2);
        assert_eq!(config.intra_step_ranks(), 2);
    }

    #[test]
    fn rejects_bad_fields() {
        let bad = RunConfig {
            p_r: 0.9,
            ..RunConfig::default()
        };
        assert!(bad.validated().is_err());
        let bad = RunConfig {
            i_min_ua: -1.0,
            ..RunConfig::default()
        };
        assert!(bad.validated().is_err());
        let unknown: Result<RunConfig, _> = toml::from_str("nonsense_key = 3");
        assert!(unknown.is_err());
    }
}
