//! Ladder evaluation: Bjøntegaard deltas, encoding time and energy, storage,
//! and scheme-versus-baseline comparison.

mod accounting;
mod bd;
mod compare;

pub use accounting::{
    encoding_energy, segment_encode_time, storage, storage_of_bitrates, EnergyModel,
};
pub use bd::{bd_quality, bd_rate, CubicFit, QualityMetric, RdCurve, RdPoint, MIN_CURVE_POINTS};
pub use compare::{
    compare_schemes, ComparisonReport, EvaluatedLadder, EvaluatedRep, SchemeReport, SegmentReport,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("RD curve needs at least 4 points, got {got}")]
    InsufficientPoints { got: usize },
    #[error("RD curves do not overlap")]
    NoOverlap,
    #[error("least-squares fit is singular")]
    DegenerateFit,
    #[error("curves use different quality metrics")]
    MetricMismatch,
    #[error("invalid RD curve: {0}")]
    InvalidCurve(String),
    #[error("ladder has no representations")]
    EmptyLadder,
    #[error("invalid encoding time {0}")]
    InvalidTime(f64),
    #[error("energy coefficient must be positive, got {0}")]
    InvalidKappa(f64),
    #[error("segment duration must be positive, got {0}")]
    InvalidDuration(f64),
    #[error("segment mismatch: {0}")]
    SegmentMismatch(String),
    #[error("invalid evaluation data: {0}")]
    InvalidData(String),
}
