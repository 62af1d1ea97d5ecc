//! Lot configuration: detector tunables plus per-slot GPS positions.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detector::DetectorParams;
use crate::imaging::CannyThresholds;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GpsPoint {
    pub lat: f64,
    pub lon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LotConfig {
    pub lot_id: String,
    #[serde(flatten)]
    pub detector: DetectorParams,
    #[serde(default = "default_canny_lo")]
    pub canny_lo: f64,
    #[serde(default = "default_canny_hi")]
    pub canny_hi: f64,
    /// One entry per slot, in slot order.
    pub slots_gps: Vec<GpsPoint>,
}

fn default_canny_lo() -> f64 {
    50.0
}

fn default_canny_hi() -> f64 {
    150.0
}

impl Default for LotConfig {
    fn default() -> Self {
        let detector = DetectorParams::default();
        let slots_gps = (0..detector.slot_count)
            .map(|i| GpsPoint {
                lat: 12.840715,
                lon: 80.153400 + 0.000025 * i as f64,
            })
            .collect();
        Self {
            lot_id: "lot-1".into(),
            detector,
            canny_lo: default_canny_lo(),
            canny_hi: default_canny_hi(),
            slots_gps,
        }
    }
}

impl LotConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn slot_count(&self) -> usize {
        self.detector.slot_count
    }

    pub fn canny(&self) -> CannyThresholds {
        CannyThresholds {
            low: self.canny_lo,
            high: self.canny_hi,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if self.lot_id.is_empty()
            || !self
                .lot_id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return invalid(format!("lot_id {:?} must be non-empty [A-Za-z0-9_-]", self.lot_id));
        }
        self.detector
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        CannyThresholds::new(self.canny_lo, self.canny_hi)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.slots_gps.len() != self.slot_count() {
            return invalid(format!(
                "slots_gps has {} entries for {} slots",
                self.slots_gps.len(),
                self.slot_count()
            ));
        }
        for (i, g) in self.slots_gps.iter().enumerate() {
            if !(-90.0..=90.0).contains(&g.lat) || !(-180.0..=180.0).contains(&g.lon) {
                return invalid(format!("slot {i} gps ({}, {}) out of range", g.lat, g.lon));
            }
        }
        Ok(())
    }
}
