use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::accounting::{segment_encode_time, storage_of_bitrates, EnergyModel};
use super::bd::{bd_quality, bd_rate, QualityMetric, RdCurve, RdPoint};
use super::MetricsError;

/// A representation with measured (or simulated) results.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluatedRep {
    pub bitrate_mbps: f64,
    pub resolution: u32,
    pub psnr: Option<f64>,
    pub vmaf: Option<f64>,
    pub encode_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluatedLadder {
    pub segment_id: String,
    pub reps: Vec<EvaluatedRep>,
}

impl EvaluatedLadder {
    pub fn new(
        segment_id: impl Into<String>,
        mut reps: Vec<EvaluatedRep>,
    ) -> Result<Self, MetricsError> {
        let segment_id = segment_id.into();
        if reps.is_empty() {
            return Err(MetricsError::EmptyLadder);
        }
        reps.sort_by(|a, b| a.bitrate_mbps.total_cmp(&b.bitrate_mbps));
        if reps
            .windows(2)
            .any(|w| w[0].bitrate_mbps == w[1].bitrate_mbps)
        {
            return Err(MetricsError::InvalidData(format!(
                "segment `{segment_id}` has two representations at one bitrate"
            )));
        }
        Ok(Self { segment_id, reps })
    }

    fn curve(&self, metric: QualityMetric) -> Result<RdCurve, MetricsError> {
        let points = self
            .reps
            .iter()
            .filter_map(|r| {
                let q = match metric {
                    QualityMetric::Psnr => r.psnr,
                    QualityMetric::Vmaf => r.vmaf,
                };
                q.map(|quality| RdPoint {
                    bitrate_mbps: r.bitrate_mbps,
                    quality,
                })
            })
            .collect();
        RdCurve::new(points, metric)
    }

    fn times(&self) -> Vec<f64> {
        self.reps.iter().map(|r| r.encode_time_s).collect()
    }

    fn energy(&self, model: &EnergyModel) -> Result<f64, MetricsError> {
        let encodes: Vec<(u32, f64)> = self
            .reps
            .iter()
            .map(|r| (r.resolution, r.encode_time_s))
            .collect();
        model.energy(&encodes)
    }

    fn storage(&self, duration: f64) -> Result<f64, MetricsError> {
        storage_of_bitrates(
            &self.reps.iter().map(|r| r.bitrate_mbps).collect::<Vec<_>>(),
            duration,
        )
    }
}

/// Averages over segments. BD fields average only segments where the
/// metric was computable and are `None` when none was.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeReport {
    pub bd_rate_psnr: Option<f64>,
    pub bd_rate_vmaf: Option<f64>,
    pub bd_psnr: Option<f64>,
    pub bd_vmaf: Option<f64>,
    pub delta_e: Option<f64>,
    pub delta_s: Option<f64>,
    pub mean_segment_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentReport {
    pub segment_id: String,
    pub baseline_reps: usize,
    pub candidate_reps: usize,
    pub baseline_energy_j: f64,
    pub candidate_energy_j: f64,
    pub baseline_storage_mb: f64,
    pub candidate_storage_mb: f64,
    pub baseline_segment_time: f64,
    pub candidate_segment_time: f64,
    pub delta_e: Option<f64>,
    pub delta_s: Option<f64>,
    pub bd_rate_psnr: Option<f64>,
    pub bd_rate_vmaf: Option<f64>,
    pub bd_psnr: Option<f64>,
    pub bd_vmaf: Option<f64>,
    /// BD computations that failed for this segment, e.g. too few points.
    pub bd_errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub report: SchemeReport,
    pub baseline_mean_segment_time: f64,
    pub segments: Vec<SegmentReport>,
}

fn relative_delta(candidate: f64, baseline: f64) -> Option<f64> {
    (baseline != 0.0).then(|| 100.0 * (candidate - baseline) / baseline)
}

fn mean_defined(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let defined: Vec<f64> = values.flatten().collect();
    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
}

fn index_by_segment<'a>(
    ladders: &'a [EvaluatedLadder],
    which: &str,
) -> Result<HashMap<&'a str, &'a EvaluatedLadder>, MetricsError> {
    let mut map = HashMap::with_capacity(ladders.len());
    for l in ladders {
        if map.insert(l.segment_id.as_str(), l).is_some() {
            return Err(MetricsError::SegmentMismatch(format!(
                "segment `{}` appears twice in the {which} set",
                l.segment_id
            )));
        }
    }
    Ok(map)
}

/// Compare `candidate` ladders against `baseline` ladders segment by segment.
/// Relative deltas are computed per segment and then averaged; segments
/// are reported in baseline order.
pub fn compare_schemes(
    baseline: &[EvaluatedLadder],
    candidate: &[EvaluatedLadder],
    energy: &EnergyModel,
    duration: f64,
) -> Result<ComparisonReport, MetricsError> {
    if baseline.is_empty() {
        return Err(MetricsError::SegmentMismatch(
            "no segments to compare".into(),
        ));
    }
    energy.validate()?;
    let base_idx = index_by_segment(baseline, "baseline")?;
    let cand_idx = index_by_segment(candidate, "candidate")?;
    let base_ids: HashSet<&str> = base_idx.keys().copied().collect();
    let cand_ids: HashSet<&str> = cand_idx.keys().copied().collect();
    if base_ids != cand_ids {
        let mut missing: Vec<&str> = base_ids.symmetric_difference(&cand_ids).copied().collect();
        missing.sort_unstable();
        return Err(MetricsError::SegmentMismatch(format!(
            "segments present in only one set: {}",
            missing.join(", ")
        )));
    }

    let mut segments = Vec::with_capacity(baseline.len());
    for b in baseline {
        let c = cand_idx[b.segment_id.as_str()];
        let baseline_energy_j = b.energy(energy)?;
        let candidate_energy_j = c.energy(energy)?;
        let baseline_storage_mb = b.storage(duration)?;
        let candidate_storage_mb = c.storage(duration)?;

        let mut bd_errors = Vec::new();
        let mut record = |label: &str, r: Result<f64, MetricsError>| match r {
            Ok(v) => Some(v),
            Err(e) => {
                bd_errors.push(format!("{label}: {e}"));
                None
            }
        };
        let curves = |m| Ok::<_, MetricsError>((b.curve(m)?, c.curve(m)?));
        let psnr = curves(QualityMetric::Psnr);
        let vmaf = curves(QualityMetric::Vmaf);
        let bd_rate_psnr = record(
            "bd_rate_psnr",
            psnr.clone().and_then(|(x, y)| bd_rate(&x, &y)),
        );
        let bd_psnr = record("bd_psnr", psnr.and_then(|(x, y)| bd_quality(&x, &y)));
        let bd_rate_vmaf = record(
            "bd_rate_vmaf",
            vmaf.clone().and_then(|(x, y)| bd_rate(&x, &y)),
        );
        let bd_vmaf = record("bd_vmaf", vmaf.and_then(|(x, y)| bd_quality(&x, &y)));

        segments.push(SegmentReport {
            segment_id: b.segment_id.clone(),
            baseline_reps: b.reps.len(),
            candidate_reps: c.reps.len(),
            baseline_energy_j,
            candidate_energy_j,
            baseline_storage_mb,
            candidate_storage_mb,
            baseline_segment_time: segment_encode_time(&b.times())?,
            candidate_segment_time: segment_encode_time(&c.times())?,
            delta_e: relative_delta(candidate_energy_j, baseline_energy_j),
            delta_s: relative_delta(candidate_storage_mb, baseline_storage_mb),
            bd_rate_psnr,
            bd_rate_vmaf,
            bd_psnr,
            bd_vmaf,
            bd_errors,
        });
    }

    let n = segments.len() as f64;
    let report = SchemeReport {
        bd_rate_psnr: mean_defined(segments.iter().map(|s| s.bd_rate_psnr)),
        bd_rate_vmaf: mean_defined(segments.iter().map(|s| s.bd_rate_vmaf)),
        bd_psnr: mean_defined(segments.iter().map(|s| s.bd_psnr)),
        bd_vmaf: mean_defined(segments.iter().map(|s| s.bd_vmaf)),
        delta_e: mean_defined(segments.iter().map(|s| s.delta_e)),
        delta_s: mean_defined(segments.iter().map(|s| s.delta_s)),
        mean_segment_time: segments
            .iter()
            .map(|s| s.candidate_segment_time)
            .sum::<f64>()
            / n,
    };
    Ok(ComparisonReport {
        report,
        baseline_mean_segment_time: segments
            .iter()
            .map(|s| s.baseline_segment_time)
            .sum::<f64>()
            / n,
        segments,
    })
}
