//! Random-forest regression for post-upscaling quality and encoding time.
//!
//! A forest maps five inputs `(E_Y, h, L_Y, log2 resolution, log2 Mbps)` to
//! one scalar target. One model is trained per `(target_kind, vsr_tag)` pair.
//! Training is deterministic in `(records order, params, seed)`: the seed
//! drives a [`SplitMix64`] stream that first hands out one seed per tree, and
//! each tree then draws its bootstrap indices and per-node feature subsets
//! from its own stream.

mod tree;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complexity::SegmentFeatures;
use crate::rng::SplitMix64;

pub(crate) use tree::bounded_mean;
pub use tree::Node;

pub const FEATURE_COUNT: usize = 5;
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ForestError {
    #[error("need at least {needed} records, got {got}")]
    EmptyDataset { needed: usize, got: usize },
    #[error("records mix target kinds or VSR contexts: {0}")]
    MixedTargets(String),
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),
    #[error("invalid training record: {0}")]
    InvalidRecord(String),
    #[error("model version {found} is not supported (expected {MODEL_VERSION})")]
    VersionMismatch { found: u32 },
    #[error("corrupt model: {0}")]
    CorruptModel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetKind {
    Quality,
    Time,
}

/// Client-side upscaling context a model was trained for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VsrTag {
    None,
    Fsrcnn,
}

impl TargetKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Quality => "quality",
            Self::Time => "time",
        }
    }
}

impl VsrTag {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Fsrcnn => "fsrcnn",
        }
    }
}

impl fmt::Display for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for VsrTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TargetKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quality" => Ok(Self::Quality),
            "time" => Ok(Self::Time),
            other => Err(format!("unknown target kind `{other}`")),
        }
    }
}

impl FromStr for VsrTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Self::None),
            "fsrcnn" => Ok(Self::Fsrcnn),
            other => Err(format!("unknown vsr tag `{other}`")),
        }
    }
}

/// Model inputs with log2 applied to resolution and bitrate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; FEATURE_COUNT]);

impl FeatureVector {
    pub fn new(features: &SegmentFeatures, resolution: u32, bitrate_mbps: f64) -> Self {
        Self([
            features.e_y,
            features.h,
            features.l_y,
            (resolution as f64).log2(),
            bitrate_mbps.log2(),
        ])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingRecord {
    pub segment_id: String,
    pub features: SegmentFeatures,
    pub resolution: u32,
    pub bitrate_mbps: f64,
    pub vsr_tag: VsrTag,
    pub target_kind: TargetKind,
    pub target: f64,
}

impl TrainingRecord {
    /// Validates inputs; quality targets are clamped to `[0, 100]`.
    pub fn new(
        segment_id: impl Into<String>,
        features: SegmentFeatures,
        resolution: u32,
        bitrate_mbps: f64,
        vsr_tag: VsrTag,
        target_kind: TargetKind,
        target: f64,
    ) -> Result<Self, ForestError> {
        let bad = |m: String| Err(ForestError::InvalidRecord(m));
        if resolution == 0 {
            return bad("resolution must be positive".into());
        }
        if !(bitrate_mbps.is_finite() && bitrate_mbps > 0.0) {
            return bad(format!("bitrate {bitrate_mbps} must be positive"));
        }
        let f = features;
        if ![f.e_y, f.h, f.l_y].iter().all(|v| v.is_finite()) {
            return bad("non-finite complexity features".into());
        }
        if !target.is_finite() {
            return bad(format!("non-finite target {target}"));
        }
        let target = match target_kind {
            TargetKind::Quality => target.clamp(0.0, 100.0),
            TargetKind::Time if target <= 0.0 => {
                return bad(format!("time target {target} must be positive"))
            }
            TargetKind::Time => target,
        };
        Ok(Self {
            segment_id: segment_id.into(),
            features,
            resolution,
            bitrate_mbps,
            vsr_tag,
            target_kind,
            target,
        })
    }

    pub fn feature_vector(&self) -> FeatureVector {
        FeatureVector::new(&self.features, self.resolution, self.bitrate_mbps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub features_per_split: usize,
    /// Train each tree on a bootstrap resample; otherwise on the full set.
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: 12,
            min_samples_leaf: 2,
            features_per_split: 3,
            bootstrap: true,
            seed: 0,
        }
    }
}

impl ForestParams {
    pub fn validate(&self) -> Result<(), ForestError> {
        let bad = |m: &str| Err(ForestError::InvalidHyperparams(m.into()));
        if self.n_trees == 0 {
            return bad("n_trees must be at least 1");
        }
        if self.max_depth == 0 {
            return bad("max_depth must be at least 1");
        }
        if self.min_samples_leaf == 0 {
            return bad("min_samples_leaf must be at least 1");
        }
        if !(1..=FEATURE_COUNT).contains(&self.features_per_split) {
            return bad("features_per_split must be in 1..=5");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub version: u32,
    pub target_kind: TargetKind,
    pub vsr_tag: VsrTag,
    pub hyperparams: ForestParams,
    pub trees: Vec<Node>,
}

impl ForestModel {
    /// Forest of single-leaf trees; handy for fixtures.
    pub fn constant(target_kind: TargetKind, vsr_tag: VsrTag, values: &[f64]) -> Self {
        Self {
            version: MODEL_VERSION,
            target_kind,
            vsr_tag,
            hyperparams: ForestParams {
                n_trees: values.len(),
                ..ForestParams::default()
            },
            trees: values.iter().map(|&value| Node::Leaf { value }).collect(),
        }
    }

    /// Mean of tree outputs before clamping.
    pub fn predict_raw(&self, x: &FeatureVector) -> f64 {
        bounded_mean(self.trees.iter().map(|t| t.predict(&x.0)))
    }

    /// Clamped prediction: `[0, 100]` for quality, `>= 0` for time.
    pub fn predict(&self, x: &FeatureVector) -> f64 {
        let raw = self.predict_raw(x);
        match self.target_kind {
            TargetKind::Quality => raw.clamp(0.0, 100.0),
            TargetKind::Time => raw.max(0.0),
        }
    }
}

fn check_consistent(records: &[TrainingRecord]) -> Result<(TargetKind, VsrTag), ForestError> {
    let first = &records[0];
    let (kind, tag) = (first.target_kind, first.vsr_tag);
    if let Some(r) = records
        .iter()
        .find(|r| r.target_kind != kind || r.vsr_tag != tag)
    {
        return Err(ForestError::MixedTargets(format!(
            "expected ({kind}, {tag}), found ({}, {}) in segment `{}`",
            r.target_kind, r.vsr_tag, r.segment_id
        )));
    }
    Ok((kind, tag))
}

pub fn fit(records: &[TrainingRecord], params: &ForestParams) -> Result<ForestModel, ForestError> {
    if records.len() < 2 {
        return Err(ForestError::EmptyDataset {
            needed: 2,
            got: records.len(),
        });
    }
    params.validate()?;
    let (target_kind, vsr_tag) = check_consistent(records)?;

    let xs: Vec<[f64; FEATURE_COUNT]> = records.iter().map(|r| r.feature_vector().0).collect();
    if let Some(i) = xs.iter().position(|x| !x.iter().all(|v| v.is_finite())) {
        return Err(ForestError::InvalidRecord(format!(
            "row {i} has non-finite features"
        )));
    }
    let ys: Vec<f64> = records.iter().map(|r| r.target).collect();

    let mut master = SplitMix64::new(params.seed);
    let tree_seeds: Vec<u64> = (0..params.n_trees).map(|_| master.next_u64()).collect();
    let builder = tree::TreeBuilder {
        xs: &xs,
        ys: &ys,
        params,
    };
    let trees = tree_seeds
        .par_iter()
        .map(|&s| builder.grow(&mut SplitMix64::new(s)))
        .collect();

    Ok(ForestModel {
        version: MODEL_VERSION,
        target_kind,
        vsr_tag,
        hyperparams: *params,
        trees,
    })
}

pub fn predict(model: &ForestModel, x: &FeatureVector) -> f64 {
    model.predict(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub mae: f64,
    /// Population standard deviation of the absolute errors.
    pub sd: f64,
}

pub fn evaluate(
    model: &ForestModel,
    records: &[TrainingRecord],
) -> Result<Evaluation, ForestError> {
    if records.is_empty() {
        return Err(ForestError::EmptyDataset { needed: 1, got: 0 });
    }
    let (kind, tag) = check_consistent(records)?;
    if (kind, tag) != (model.target_kind, model.vsr_tag) {
        return Err(ForestError::MixedTargets(format!(
            "model is ({}, {}), records are ({kind}, {tag})",
            model.target_kind, model.vsr_tag
        )));
    }
    let errors: Vec<f64> = records
        .iter()
        .map(|r| (model.predict(&r.feature_vector()) - r.target).abs())
        .collect();
    Ok(abs_error_stats(&errors))
}

pub(crate) fn abs_error_stats(errors: &[f64]) -> Evaluation {
    let n = errors.len() as f64;
    let mae = errors.iter().sum::<f64>() / n;
    let var = errors.iter().map(|e| (e - mae).powi(2)).sum::<f64>() / n;
    Evaluation {
        mae,
        sd: var.sqrt(),
    }
}

pub fn serialize_model(model: &ForestModel) -> Vec<u8> {
    serde_json::to_vec(model).expect("forest models always serialize")
}

pub fn deserialize_model(bytes: &[u8]) -> Result<ForestModel, ForestError> {
    #[derive(Deserialize)]
    struct Probe {
        version: u32,
    }
    let probe: Probe =
        serde_json::from_slice(bytes).map_err(|e| ForestError::CorruptModel(e.to_string()))?;
    if probe.version != MODEL_VERSION {
        return Err(ForestError::VersionMismatch {
            found: probe.version,
        });
    }
    let model: ForestModel =
        serde_json::from_slice(bytes).map_err(|e| ForestError::CorruptModel(e.to_string()))?;
    if model.trees.is_empty() {
        return Err(ForestError::CorruptModel("model has no trees".into()));
    }
    for (i, t) in model.trees.iter().enumerate() {
        t.check()
            .map_err(|e| ForestError::CorruptModel(format!("tree {i}: {e}")))?;
    }
    Ok(model)
}

/// Group records by `(target_kind, vsr_tag)`, preserving row order in each group.
pub fn group_records(
    records: &[TrainingRecord],
) -> BTreeMap<(TargetKind, VsrTag), Vec<TrainingRecord>> {
    let mut groups: BTreeMap<_, Vec<_>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.target_kind, r.vsr_tag))
            .or_default()
            .push(r.clone());
    }
    groups
}

/// Hold out a seeded `holdout_fraction` of segments (not rows): row order
/// decides the segment order that gets shuffled, so reordering rows can
/// change the split.
pub fn holdout_split(
    records: &[TrainingRecord],
    holdout_fraction: f64,
    seed: u64,
) -> (Vec<TrainingRecord>, Vec<TrainingRecord>) {
    let mut ids: Vec<&str> = Vec::new();
    let mut seen = HashMap::new();
    for r in records {
        if !seen.contains_key(r.segment_id.as_str()) {
            seen.insert(r.segment_id.as_str(), ());
            ids.push(&r.segment_id);
        }
    }
    SplitMix64::new(seed).shuffle(&mut ids);
    let n_test = ((ids.len() as f64) * holdout_fraction.clamp(0.0, 1.0)).round() as usize;
    let n_test = n_test.min(ids.len().saturating_sub(1));
    let test_ids: std::collections::HashSet<&str> = ids[..n_test].iter().copied().collect();
    records
        .iter()
        .cloned()
        .partition(|r| !test_ids.contains(r.segment_id.as_str()))
}
