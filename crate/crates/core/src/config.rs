//! Detector configuration and its `key = value` file format.
//!
//! Blank lines and lines starting with `#` are ignored. Unknown keys are an
//! error so a typo cannot silently fall back to a default.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::metrics::SelfCitationMode;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnomalyConfig {
    /// z-score a rank must reach to join a residual run.
    pub z_on: f64,
    /// Minimum run length (ranks) for a humpback.
    pub min_run: usize,
    /// Half-width of the rank neighbourhood of the h-paper a run must touch.
    pub near_h: usize,
    /// Half-width of the rank window around h excluded from baseline fitting.
    pub exclude_window: usize,
    /// Minimum number of cited publications needed to fit a baseline.
    pub min_points: usize,
    /// Minimum summed z over the run, in robust sigma units.
    pub min_mass: f64,
    /// FWCI cells smaller than this leave their publications uncovered.
    pub min_cell_size: usize,
    pub self_cite_threshold: f64,
    pub fwci_threshold: f64,
    /// Power-law fits below this log-log R² fall back to convex regression.
    pub min_r2: f64,
    pub self_citation_mode: SelfCitationMode,
    pub score_bias: f64,
    pub score_peak_z: f64,
    pub score_excess_mass: f64,
    pub score_self_cite: f64,
    pub score_fwci: f64,
}

impl Default for AnomalyConfig {
    fn default() -> Self {
        AnomalyConfig {
            z_on: 2.0,
            min_run: 8,
            near_h: 10,
            exclude_window: 20,
            min_points: 50,
            min_mass: 5.0,
            min_cell_size: 5,
            self_cite_threshold: 0.3,
            fwci_threshold: 3.0,
            min_r2: 0.8,
            self_citation_mode: SelfCitationMode::Author,
            score_bias: -6.0,
            score_peak_z: 0.6,
            score_excess_mass: 0.02,
            score_self_cite: 4.0,
            score_fwci: 0.15,
        }
    }
}

fn parse_value<T: std::str::FromStr>(
    key: &str,
    value: &str,
    line: usize,
) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::Parse {
        line,
        message: format!("invalid value {value:?} for {key}"),
    })
}

impl AnomalyConfig {
    pub fn parse(text: &str) -> Result<AnomalyConfig, ConfigError> {
        let mut cfg = AnomalyConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Parse {
                    line,
                    message: format!("expected `key = value`, got {content:?}"),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "z_on" => cfg.z_on = parse_value(key, value, line)?,
                "min_run" => cfg.min_run = parse_value(key, value, line)?,
                "near_h" => cfg.near_h = parse_value(key, value, line)?,
                "exclude_window" => cfg.exclude_window = parse_value(key, value, line)?,
                "min_points" => cfg.min_points = parse_value(key, value, line)?,
                "min_mass" => cfg.min_mass = parse_value(key, value, line)?,
                "min_cell_size" => cfg.min_cell_size = parse_value(key, value, line)?,
                "self_cite_threshold" => cfg.self_cite_threshold = parse_value(key, value, line)?,
                "fwci_threshold" => cfg.fwci_threshold = parse_value(key, value, line)?,
                "min_r2" => cfg.min_r2 = parse_value(key, value, line)?,
                "self_citation_mode" => {
                    cfg.self_citation_mode = match value {
                        "author" => SelfCitationMode::Author,
                        "institution" => SelfCitationMode::Institution,
                        _ => return Err(ConfigError::Parse {
                            line,
                            message: format!(
                                "self_citation_mode must be author or institution, got {value:?}"
                            ),
                        }),
                    }
                }
                "score_bias" => cfg.score_bias = parse_value(key, value, line)?,
                "score_peak_z" => cfg.score_peak_z = parse_value(key, value, line)?,
                "score_excess_mass" => cfg.score_excess_mass = parse_value(key, value, line)?,
                "score_self_cite" => cfg.score_self_cite = parse_value(key, value, line)?,
                "score_fwci" => cfg.score_fwci = parse_value(key, value, line)?,
                other => {
                    return Err(ConfigError::Parse {
                        line,
                        message: format!("unknown key {other:?}"),
                    })
                }
            }
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<AnomalyConfig, ConfigError> {
        AnomalyConfig::parse(&std::fs::read_to_string(path)?)
    }

    /// Renders the config in the file format; `parse(to_text())` round trips.
    pub fn to_text(&self) -> String {
        let mode = match self.self_citation_mode {
            SelfCitationMode::Author => "author",
            SelfCitationMode::Institution => "institution",
        };
        format!(
            "z_on = {}\nmin_run = {}\nnear_h = {}\nexclude_window = {}\nmin_points = {}\n\
             min_mass = {}\nmin_cell_size = {}\nself_cite_threshold = {}\nfwci_threshold = {}\n\
             min_r2 = {}\nself_citation_mode = {mode}\nscore_bias = {}\nscore_peak_z = {}\n\
             score_excess_mass = {}\nscore_self_cite = {}\nscore_fwci = {}\n",
            self.z_on,
            self.min_run,
            self.near_h,
            self.exclude_window,
            self.min_points,
            self.min_mass,
            self.min_cell_size,
            self.self_cite_threshold,
            self.fwci_threshold,
            self.min_r2,
            self.score_bias,
            self.score_peak_z,
            self.score_excess_mass,
            self.score_self_cite,
            self.score_fwci,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let cfg = AnomalyConfig::parse(
            "# tuned\nz_on = 2.5\n\nmin_run=6\nself_citation_mode = institution\n",
        )
        .unwrap();
        assert_eq!(cfg.z_on, 2.5);
        assert_eq!(cfg.min_run, 6);
        assert_eq!(cfg.self_citation_mode, SelfCitationMode::Institution);
        assert_eq!(cfg.near_h, AnomalyConfig::default().near_h);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(matches!(
            AnomalyConfig::parse("zon = 1"),
            Err(ConfigError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            AnomalyConfig::parse("\nmin_run = many"),
            Err(ConfigError::Parse { line: 2, .. })
        ));
        assert!(AnomalyConfig::parse("just text").is_err());
    }

    #[test]
    fn text_round_trip() {
        let cfg = AnomalyConfig {
            z_on: 1.75,
            self_citation_mode: SelfCitationMode::Institution,
            ..AnomalyConfig::default()
        };
        assert_eq!(AnomalyConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }
}
