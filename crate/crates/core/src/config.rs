//! Run configuration and the default experiment sets.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::complexity::DEFAULT_BLOCK_SIZE;
use crate::forest::{ForestParams, VsrTag};
use crate::ladder::{check_sets, LadderParams, LatencyBudget};
use crate::metrics::EnergyModel;

pub const TABLE_RESOLUTIONS: [u32; 4] = [360, 720, 1080, 2160];

pub const TABLE_BITRATES: [f64; 12] = [
    0.145, 0.3, 0.6, 0.9, 1.6, 2.4, 3.4, 4.5, 5.8, 8.1, 11.6, 16.8,
];

/// Latency budgets of the evaluated configurations, in seconds.
pub const TABLE_TAU_L: [f64; 5] = [1.0, 2.0, 4.0, 8.0, f64::INFINITY];
pub const TABLE_V_J: [f64; 3] = [2.0, 4.0, 6.0];
pub const TABLE_V_T: [f64; 3] = [98.0, 96.0, 94.0];

pub const DEFAULT_SEGMENT_DURATION: f64 = 4.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Forest hyperparameters; the seed lives on [`RunConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestSettings {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub features_per_split: usize,
    pub bootstrap: bool,
}

impl Default for ForestSettings {
    fn default() -> Self {
        let p = ForestParams::default();
        Self {
            n_trees: p.n_trees,
            max_depth: p.max_depth,
            min_samples_leaf: p.min_samples_leaf,
            features_per_split: p.features_per_split,
            bootstrap: p.bootstrap,
        }
    }
}

impl ForestSettings {
    pub fn with_seed(&self, seed: u64) -> ForestParams {
        ForestParams {
            n_trees: self.n_trees,
            max_depth: self.max_depth,
            min_samples_leaf: self.min_samples_leaf,
            features_per_split: self.features_per_split,
            bootstrap: self.bootstrap,
            seed,
        }
    }
}

/// Optional VMAF thresholds are written as a number or `"none"`.
pub mod optional_points {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.serialize_f64(*x),
            None => s.serialize_str("none"),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Some(v)),
            Raw::Text(t) => parse(&t).map_err(serde::de::Error::custom),
        }
    }

    pub fn parse(s: &str) -> Result<Option<f64>, String> {
        match s.trim() {
            "none" | "" => Ok(None),
            t => t
                .parse()
                .map(Some)
                .map_err(|_| format!("expected a number or `none`, got `{t}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub resolutions: Vec<u32>,
    pub bitrates: Vec<f64>,
    #[serde(rename = "tau_L")]
    pub tau_l: LatencyBudget,
    /// `None` disables pruning.
    #[serde(rename = "v_J", with = "optional_points")]
    pub v_j: Option<f64>,
    #[serde(rename = "v_T", with = "optional_points")]
    pub v_t: Option<f64>,
    pub vsr_tag: VsrTag,
    pub seed: u64,
    pub block_size: usize,
    pub forest: ForestSettings,
    pub kappa: f64,
    /// Overrides `kappa` for individual resolutions, keyed by height.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub kappa_per_resolution: BTreeMap<String, f64>,
    pub segment_duration: f64,
    pub holdout_fraction: f64,
    /// CSV overriding the baseline bitrate to resolution pairing.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairing: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            resolutions: TABLE_RESOLUTIONS.to_vec(),
            bitrates: TABLE_BITRATES.to_vec(),
            tau_l: LatencyBudget::new(2.0).expect("positive"),
            v_j: Some(6.0),
            v_t: Some(94.0),
            vsr_tag: VsrTag::None,
            seed: 0,
            block_size: DEFAULT_BLOCK_SIZE,
            forest: ForestSettings::default(),
            kappa: 1.0,
            kappa_per_resolution: BTreeMap::new(),
            segment_duration: DEFAULT_SEGMENT_DURATION,
            holdout_fraction: 0.2,
            pairing: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        check_sets(&self.resolutions, &self.bitrates)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if let Some(v) = self.v_j {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("v_J must be a non-negative number, got {v}"));
            }
        }
        if let Some(v) = self.v_t {
            if !v.is_finite() {
                return bad(format!("v_T must be finite, got {v}"));
            }
        }
        if self.block_size < 2 {
            return bad(format!(
                "block_size must be at least 2, got {}",
                self.block_size
            ));
        }
        self.forest
            .with_seed(self.seed)
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.energy_model()?;
        if !(self.segment_duration.is_finite() && self.segment_duration > 0.0) {
            return bad(format!(
                "segment_duration must be positive, got {}",
                self.segment_duration
            ));
        }
        if !(0.0..1.0).contains(&self.holdout_fraction) {
            return bad(format!(
                "holdout_fraction must be in [0, 1), got {}",
                self.holdout_fraction
            ));
        }
        Ok(())
    }

    pub fn forest_params(&self) -> ForestParams {
        self.forest.with_seed(self.seed)
    }

    pub fn ladder_params(&self) -> LadderParams {
        LadderParams {
            tau_l: self.tau_l,
            v_j: self.v_j,
            v_t: self.v_t,
            vsr_tag: self.vsr_tag,
        }
    }

    pub fn energy_model(&self) -> Result<EnergyModel, ConfigError> {
        let mut model = EnergyModel::uniform(self.kappa);
        for (k, v) in &self.kappa_per_resolution {
            let r: u32 = k.parse().map_err(|_| {
                ConfigError::Invalid(format!(
                    "kappa_per_resolution key `{k}` is not a resolution"
                ))
            })?;
            model.per_resolution.insert(r, *v);
        }
        model
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(model)
    }
}
