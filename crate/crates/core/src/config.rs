//! Pipeline configuration. Every threshold has a baked-in default; a
//! `key = value` config file and command-line flags override them.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::recognition::DEFAULT_TAXONOMY;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorKind {
    Passthrough,
    Heuristic,
}

impl DetectorKind {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "passthrough" => Ok(DetectorKind::Passthrough),
            "heuristic" => Ok(DetectorKind::Heuristic),
            other => Err(ConfigError::Invalid(format!("unknown detector `{other}`"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DetectorKind::Passthrough => "passthrough",
            DetectorKind::Heuristic => "heuristic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StyleOracleKind {
    Rules,
    Llm,
}

impl StyleOracleKind {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "rules" => Ok(StyleOracleKind::Rules),
            "llm" => Ok(StyleOracleKind::Llm),
            other => Err(ConfigError::Invalid(format!("unknown style oracle `{other}`"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StyleOracleKind::Rules => "rules",
            StyleOracleKind::Llm => "llm",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Containment slack in px.
    pub eps_containment: f64,
    /// Minimum share of a layer's area inside a group box for membership.
    pub iou_threshold: f64,
    /// Overlap area, in px², above which siblings count as overlapping.
    pub overlap_eps: f64,
    pub max_icon_px: f64,
    pub gap_px: f64,
    /// Relative size difference allowed between list items.
    pub list_size_tolerance: f64,
    /// Top and bottom share of the canvas height searched for bars.
    pub bar_band: f64,
    /// Minimum bar width as a share of the canvas width.
    pub bar_min_width: f64,
    /// Frequencies per scalar in the spatial encoding.
    pub encoding_frequencies: usize,
    pub detector: DetectorKind,
    pub style_oracle: StyleOracleKind,
    pub taxonomy: Vec<String>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            eps_containment: 0.5,
            iou_threshold: 0.7,
            overlap_eps: 1.0,
            max_icon_px: 64.0,
            gap_px: 4.0,
            list_size_tolerance: 0.1,
            bar_band: 0.15,
            bar_min_width: 0.9,
            encoding_frequencies: 16,
            detector: DetectorKind::Heuristic,
            style_oracle: StyleOracleKind::Rules,
            taxonomy: DEFAULT_TAXONOMY.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl PipelineConfig {
    /// Parses a config file; absent keys keep their defaults.
    pub fn from_toml(src: &str) -> Result<Self, ConfigError> {
        let cfg: PipelineConfig = toml::from_str(src).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let thresholds = [
            ("eps_containment", self.eps_containment),
            ("iou_threshold", self.iou_threshold),
            ("overlap_eps", self.overlap_eps),
            ("max_icon_px", self.max_icon_px),
            ("gap_px", self.gap_px),
            ("list_size_tolerance", self.list_size_tolerance),
            ("bar_band", self.bar_band),
            ("bar_min_width", self.bar_min_width),
        ];
        for (name, v) in thresholds {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ConfigError::Invalid(format!("{name} must be a finite value >= 0, got {v}")));
            }
        }
        // Shares of an area or of the canvas.
        let fractions = [
            ("iou_threshold", self.iou_threshold),
            ("list_size_tolerance", self.list_size_tolerance),
            ("bar_band", self.bar_band),
            ("bar_min_width", self.bar_min_width),
        ];
        for (name, v) in fractions {
            if v > 1.0 {
                return Err(ConfigError::Invalid(format!("{name} is a fraction and must be <= 1, got {v}")));
            }
        }
        if self.encoding_frequencies < 1 {
            return Err(ConfigError::Invalid("encoding_frequencies must be >= 1".into()));
        }
        if self.taxonomy.is_empty() {
            return Err(ConfigError::Invalid("taxonomy must not be empty".into()));
        }
        Ok(())
    }

    /// Renders the effective configuration as `key = value` lines.
    pub fn show(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "eps_containment = {:?}", self.eps_containment);
        let _ = writeln!(out, "iou_threshold = {:?}", self.iou_threshold);
        let _ = writeln!(out, "overlap_eps = {:?}", self.overlap_eps);
        let _ = writeln!(out, "max_icon_px = {:?}", self.max_icon_px);
        let _ = writeln!(out, "gap_px = {:?}", self.gap_px);
        let _ = writeln!(out, "list_size_tolerance = {:?}", self.list_size_tolerance);
        let _ = writeln!(out, "bar_band = {:?}", self.bar_band);
        let _ = writeln!(out, "bar_min_width = {:?}", self.bar_min_width);
        let _ = writeln!(out, "encoding_frequencies = {}", self.encoding_frequencies);
        let _ = writeln!(out, "detector = \"{}\"", self.detector.as_str());
        let _ = writeln!(out, "style_oracle = \"{}\"", self.style_oracle.as_str());
        let labels: Vec<String> = self.taxonomy.iter().map(|t| format!("\"{t}\"")).collect();
        let _ = writeln!(out, "taxonomy = [{}]", labels.join(", "));
        out
    }
}
