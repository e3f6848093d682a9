//! Per-title bitrate ladders from video complexity features.
//!
//! The pipeline runs [`ingest`] → [`complexity`] → [`forest`] →
//! [`ladder`] → [`metrics`].

// `!(a < b)` is used on purpose so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complexity;
pub mod config;
pub mod forest;
pub mod groundtruth;
pub mod ingest;
pub mod io;
pub mod ladder;
pub mod metrics;
pub mod rng;

pub use complexity::{ComplexityAnalyzer, ComplexityError, FrameComplexity, SegmentFeatures};
pub use config::{ConfigError, ForestSettings, RunConfig, TABLE_BITRATES, TABLE_RESOLUTIONS};
pub use forest::{
    FeatureVector, ForestError, ForestModel, ForestParams, TargetKind, TrainingRecord, VsrTag,
};
pub use groundtruth::GroundTruth;
pub use ingest::{Framerate, IngestError, LumaFrame, VideoSequence};
pub use ladder::{
    Ladder, LadderError, LadderManifest, LadderParams, LatencyBudget, Pairing, PredictionGrid,
    Representation,
};
pub use metrics::{ComparisonReport, EnergyModel, MetricsError, SchemeReport};
pub use rng::SplitMix64;
