use std::path::Path;

use ladderforge_core::io::{read_evaluation, write_evaluation};
use ladderforge_core::metrics::{compare_schemes, EvaluatedLadder, MetricsError, SegmentReport};
use ladderforge_core::{GroundTruth, LadderManifest, RunConfig, SchemeReport};
use rayon::prelude::*;
use serde::Serialize;

use super::{emit, load_features};
use crate::failure::{data, Classify, CmdResult, Failure};
use crate::settings::{
    check_segment_id, manifest_path, open_input, read_input, to_json, CommonArgs,
};

pub fn simulate(
    common: &CommonArgs,
    cfg: &RunConfig,
    features: &Path,
    manifests: &Path,
) -> CmdResult {
    let rows = load_features(features)?;
    let gt = GroundTruth::default();
    let ladders = rows
        .par_iter()
        .map(|row| {
            check_segment_id(&row.segment_id)?;
            let path = manifest_path(manifests, &row.segment_id);
            let manifest: LadderManifest =
                serde_json::from_slice(&read_input(&path)?).or_data(&path.display().to_string())?;
            if manifest.segment_id != row.segment_id {
                return Err(data(format!(
                    "{} describes segment `{}`",
                    path.display(),
                    manifest.segment_id
                )));
            }
            let ladder = manifest.to_ladder().or_data(&path.display().to_string())?;
            let reps = ladder
                .reps()
                .iter()
                .map(|r| {
                    gt.evaluated_rep(
                        &row.segment_id,
                        &row.features,
                        r.resolution,
                        r.bitrate_mbps,
                        manifest.vsr_tag,
                        cfg.seed,
                    )
                })
                .collect();
            EvaluatedLadder::new(row.segment_id.clone(), reps).or_internal("simulated ladder")
        })
        .collect::<CmdResult<Vec<_>>>()?;
    let mut bytes = Vec::new();
    write_evaluation(&mut bytes, &ladders).or_internal("evaluation CSV")?;
    emit(common.out.as_deref(), cfg, "evaluation.csv", &bytes)
}

#[derive(Debug, Serialize)]
struct ReportFile<'a> {
    config: &'a RunConfig,
    report: SchemeReport,
    baseline_mean_segment_time: f64,
    segments: &'a [SegmentReport],
}

fn load_evaluation(path: &Path) -> CmdResult<Vec<EvaluatedLadder>> {
    read_evaluation(open_input(path)?).or_data(&format!("evaluation {}", path.display()))
}

pub fn evaluate(
    common: &CommonArgs,
    cfg: &RunConfig,
    baseline: &Path,
    candidate: &Path,
) -> CmdResult {
    let base = load_evaluation(baseline)?;
    let cand = load_evaluation(candidate)?;
    let energy = cfg.energy_model().or_internal("energy model")?;
    let cmp =
        compare_schemes(&base, &cand, &energy, cfg.segment_duration).map_err(|e| match e {
            MetricsError::SegmentMismatch(_) => data(format!("baseline and candidate differ: {e}")),
            other => Failure::Data(anyhow::Error::new(other).context("comparison")),
        })?;
    let bytes = to_json(&ReportFile {
        config: cfg,
        report: cmp.report,
        baseline_mean_segment_time: cmp.baseline_mean_segment_time,
        segments: &cmp.segments,
    });
    emit(common.out.as_deref(), cfg, "report.json", &bytes)
}
