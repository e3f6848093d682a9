//! Per-segment bitrate ladders: prediction grid, latency-constrained
//! resolution choice, JND pruning and the fixed HLS baseline.

mod grid;
mod hls;
mod prune;
mod select;

pub(crate) use grid::check_sets;
pub use grid::{predict_grid, GridCell, PredictionGrid};
pub use hls::{default_hls_ladder, Pairing, DEFAULT_HLS_PAIRING};
pub use prune::prune_jnd;
pub use select::{build_ladder, select_resolution, Selection};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::complexity::SegmentFeatures;
use crate::forest::{ForestModel, VsrTag};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LadderError {
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
    #[error("invalid resolution or bitrate set: {0}")]
    InvalidSets(String),
    #[error("invalid prediction grid: {0}")]
    InvalidGrid(String),
    #[error("bitrate {0} Mbps is not in the grid")]
    UnknownBitrate(f64),
    #[error("latency budget must be positive, got {0}")]
    InvalidBudget(f64),
    #[error("representation {index} has no predicted VMAF")]
    MissingPrediction { index: usize },
    #[error("ladder bitrates are not strictly increasing at index {index}")]
    UnsortedLadder { index: usize },
    #[error("ladder has no representations")]
    EmptyLadder,
    #[error("no resolution configured for {0} Mbps")]
    PairingMissing(f64),
    #[error("invalid pairing: {0}")]
    InvalidPairing(String),
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),
}

/// Maximum acceptable encoding time per representation, in seconds.
/// Infinite budgets are written as `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LatencyBudget(f64);

impl LatencyBudget {
    pub const UNBOUNDED: Self = Self(f64::INFINITY);

    pub fn new(seconds: f64) -> Result<Self, LadderError> {
        if seconds > 0.0 && !seconds.is_nan() {
            Ok(Self(seconds))
        } else {
            Err(LadderError::InvalidBudget(seconds))
        }
    }

    pub fn seconds(self) -> f64 {
        self.0
    }

    pub fn is_unbounded(self) -> bool {
        self.0.is_infinite()
    }

    pub fn admits(self, time: f64) -> bool {
        time <= self.0
    }
}

impl fmt::Display for LatencyBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unbounded() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for LatencyBudget {
    type Err = LadderError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Self::UNBOUNDED),
            other => {
                let v: f64 = other
                    .parse()
                    .map_err(|_| LadderError::InvalidBudget(f64::NAN))?;
                Self::new(v)
            }
        }
    }
}

impl Serialize for LatencyBudget {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_unbounded() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for LatencyBudget {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(d)? {
            Raw::Num(v) => LatencyBudget::new(v),
            Raw::Text(t) => t.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// One ladder rung.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Representation {
    pub bitrate_mbps: f64,
    pub resolution: u32,
    pub predicted_vmaf: Option<f64>,
    pub predicted_time_s: Option<f64>,
    /// No resolution met the latency budget; the fastest one was used.
    pub over_budget: bool,
}

impl Representation {
    pub fn new(resolution: u32, bitrate_mbps: f64) -> Self {
        Self {
            bitrate_mbps,
            resolution,
            predicted_vmaf: None,
            predicted_time_s: None,
            over_budget: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderParams {
    pub tau_l: LatencyBudget,
    /// `None` disables JND pruning.
    pub v_j: Option<f64>,
    pub v_t: Option<f64>,
    pub vsr_tag: VsrTag,
}

/// Representations with strictly increasing bitrates.
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder {
    reps: Vec<Representation>,
    params: LadderParams,
}

fn check_order(reps: &[Representation]) -> Result<(), LadderError> {
    if reps.is_empty() {
        return Err(LadderError::EmptyLadder);
    }
    for (i, pair) in reps.windows(2).enumerate() {
        if !(pair[0].bitrate_mbps < pair[1].bitrate_mbps) {
            return Err(LadderError::UnsortedLadder { index: i + 1 });
        }
    }
    Ok(())
}

impl Ladder {
    pub fn new(reps: Vec<Representation>, params: LadderParams) -> Result<Self, LadderError> {
        check_order(&reps)?;
        Ok(Self { reps, params })
    }

    pub fn reps(&self) -> &[Representation] {
        &self.reps
    }

    pub fn params(&self) -> &LadderParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn bitrates(&self) -> impl Iterator<Item = f64> + '_ {
        self.reps.iter().map(|r| r.bitrate_mbps)
    }

    /// Set the pruning parameters without pruning.
    pub fn with_jnd(mut self, v_j: Option<f64>, v_t: Option<f64>) -> Self {
        self.params.v_j = v_j;
        self.params.v_t = v_t;
        self
    }

    /// Prune with the ladder's own `v_j`/`v_t`; unchanged when `v_j` is unset.
    /// A missing `v_t` never triggers the early return.
    pub fn pruned(&self) -> Result<Ladder, LadderError> {
        match self.params.v_j {
            Some(v_j) => {
                let v_t = self.params.v_t.unwrap_or(f64::INFINITY);
                let mut out = prune_jnd(self, v_j, v_t)?;
                out.params.v_t = self.params.v_t;
                Ok(out)
            }
            None => Ok(self.clone()),
        }
    }

    pub fn to_manifest(&self, segment_id: impl Into<String>) -> LadderManifest {
        LadderManifest {
            segment_id: segment_id.into(),
            vsr_tag: self.params.vsr_tag,
            tau_l: self.params.tau_l,
            v_j: self.params.v_j,
            v_t: self.params.v_t,
            reps: self.reps.clone(),
        }
    }
}

/// Predict, select per bitrate, then prune with `params`.
pub fn per_title_ladder(
    quality_model: &ForestModel,
    time_model: &ForestModel,
    features: &SegmentFeatures,
    resolutions: &[u32],
    bitrates: &[f64],
    params: &LadderParams,
) -> Result<Ladder, LadderError> {
    if quality_model.vsr_tag != params.vsr_tag {
        return Err(LadderError::ModelMismatch(format!(
            "models are for `{}`, ladder requested for `{}`",
            quality_model.vsr_tag, params.vsr_tag
        )));
    }
    let grid = predict_grid(quality_model, time_model, features, resolutions, bitrates)?;
    build_ladder(&grid, bitrates, params.tau_l, params.vsr_tag)?
        .with_jnd(params.v_j, params.v_t)
        .pruned()
}

/// On-disk ladder description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderManifest {
    pub segment_id: String,
    pub vsr_tag: VsrTag,
    #[serde(rename = "tau_L")]
    pub tau_l: LatencyBudget,
    #[serde(rename = "v_J")]
    pub v_j: Option<f64>,
    #[serde(rename = "v_T")]
    pub v_t: Option<f64>,
    pub reps: Vec<Representation>,
}

impl LadderManifest {
    pub fn to_ladder(&self) -> Result<Ladder, LadderError> {
        Ladder::new(
            self.reps.clone(),
            LadderParams {
                tau_l: self.tau_l,
                v_j: self.v_j,
                v_t: self.v_t,
                vsr_tag: self.vsr_tag,
            },
        )
        .map_err(|e| LadderError::InvalidManifest(format!("segment `{}`: {e}", self.segment_id)))
    }
}
