use std::path::Path;

use ladderforge_core::forest::{
    evaluate, fit, group_records, holdout_split, serialize_model, Evaluation,
};
use ladderforge_core::io::{read_training, write_training};
use ladderforge_core::{GroundTruth, RunConfig, TargetKind, VsrTag};
use serde::Serialize;

use super::{emit, load_features};
use crate::failure::{data, Classify, CmdResult};
use crate::settings::{open_input, prepare_out, write_bytes, write_json};

pub fn model_file_name(kind: TargetKind, tag: VsrTag) -> String {
    format!("{kind}_{tag}.json")
}

pub fn synth_records(
    common: &crate::settings::CommonArgs,
    cfg: &RunConfig,
    features: &Path,
    tags: &[VsrTag],
) -> CmdResult {
    let rows = load_features(features)?;
    let gt = GroundTruth::default();
    let mut tags = tags.to_vec();
    tags.sort();
    tags.dedup();
    let records: Vec<_> = rows
        .iter()
        .flat_map(|r| {
            gt.training_records(
                &r.segment_id,
                &r.features,
                &cfg.resolutions,
                &cfg.bitrates,
                &tags,
                cfg.seed,
            )
        })
        .collect();
    let mut bytes = Vec::new();
    write_training(&mut bytes, &records).or_internal("training CSV")?;
    emit(common.out.as_deref(), cfg, "training.csv", &bytes)
}

#[derive(Debug, Serialize)]
struct GroupReport {
    target_kind: TargetKind,
    vsr_tag: VsrTag,
    model: String,
    train_rows: usize,
    holdout_rows: usize,
    /// `None` when the holdout split is empty.
    holdout: Option<Evaluation>,
}

#[derive(Debug, Serialize)]
struct TrainReport<'a> {
    config: &'a RunConfig,
    groups: Vec<GroupReport>,
}

pub fn train(common: &crate::settings::CommonArgs, cfg: &RunConfig, training: &Path) -> CmdResult {
    let dir = common.require_out()?;
    let records = read_training(open_input(training)?)
        .or_data(&format!("training {}", training.display()))?;
    if records.is_empty() {
        return Err(data(format!("{} has no rows", training.display())));
    }
    let params = cfg.forest_params();
    prepare_out(dir, cfg)?;
    let mut groups = Vec::new();
    for ((kind, tag), rows) in group_records(&records) {
        let (train_rows, test_rows) = holdout_split(&rows, cfg.holdout_fraction, cfg.seed);
        let model = fit(&train_rows, &params).or_data(&format!("{kind} model for `{tag}`"))?;
        let holdout = if test_rows.is_empty() {
            None
        } else {
            Some(evaluate(&model, &test_rows).or_internal("holdout evaluation")?)
        };
        let name = model_file_name(kind, tag);
        write_bytes(&dir.join(&name), &serialize_model(&model))?;
        match &holdout {
            Some(e) => println!(
                "{kind} {tag}: {} train rows, {} holdout rows, MAE {} SD {}",
                train_rows.len(),
                test_rows.len(),
                e.mae,
                e.sd
            ),
            None => println!("{kind} {tag}: {} train rows, no holdout", train_rows.len()),
        }
        groups.push(GroupReport {
            target_kind: kind,
            vsr_tag: tag,
            model: name,
            train_rows: train_rows.len(),
            holdout_rows: test_rows.len(),
            holdout,
        });
    }
    write_json(
        &dir.join("train_report.json"),
        &TrainReport {
            config: cfg,
            groups,
        },
    )
}
