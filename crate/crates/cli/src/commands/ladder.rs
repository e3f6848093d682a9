use std::path::Path;

use ladderforge_core::forest::deserialize_model;
use ladderforge_core::ladder::{default_hls_ladder, per_title_ladder};
use ladderforge_core::{ForestModel, Ladder, LadderManifest, RunConfig, TargetKind};
use rayon::prelude::*;
use serde::Serialize;

use super::load_features;
use super::train::model_file_name;
use crate::failure::{data, internal, Classify, CmdResult};
use crate::settings::{
    check_segment_id, manifest_path, pairing, prepare_out, read_input, write_json, CommonArgs,
};

/// A manifest with the configuration that produced it.
#[derive(Serialize)]
struct ManifestFile<'a> {
    #[serde(flatten)]
    manifest: &'a LadderManifest,
    config: &'a RunConfig,
}

fn load_model(dir: &Path, kind: TargetKind, cfg: &RunConfig) -> CmdResult<ForestModel> {
    let path = dir.join(model_file_name(kind, cfg.vsr_tag));
    if !path.is_file() {
        return Err(data(format!(
            "missing model: no {kind} model for vsr tag `{}` at {}",
            cfg.vsr_tag,
            path.display()
        )));
    }
    let model = deserialize_model(&read_input(&path)?).or_data(&path.display().to_string())?;
    if model.target_kind != kind || model.vsr_tag != cfg.vsr_tag {
        return Err(data(format!(
            "{} holds a ({}, {}) model",
            path.display(),
            model.target_kind,
            model.vsr_tag
        )));
    }
    Ok(model)
}

/// Guarantees the ladder module makes; a violation is a bug, not bad input.
fn check_ladder(ladder: &Ladder, cfg: &RunConfig) -> CmdResult {
    let reps = ladder.reps();
    if reps.is_empty()
        || reps
            .windows(2)
            .any(|w| w[0].bitrate_mbps >= w[1].bitrate_mbps)
    {
        return Err(internal("ladder is empty or not sorted by bitrate"));
    }
    if reps.first().map(|r| r.bitrate_mbps) != cfg.bitrates.first().copied() {
        return Err(internal("ladder lost its lowest representation"));
    }
    for r in reps {
        if !cfg.resolutions.contains(&r.resolution) {
            return Err(internal(format!(
                "resolution {} is not configured",
                r.resolution
            )));
        }
        if let Some(t) = r.predicted_time_s {
            if !r.over_budget && !cfg.tau_l.admits(t) {
                return Err(internal(format!(
                    "{} Mbps rung exceeds the latency budget without a flag",
                    r.bitrate_mbps
                )));
            }
        }
    }
    Ok(())
}

fn write_manifests(dir: &Path, cfg: &RunConfig, ladders: &[(String, Ladder)]) -> CmdResult {
    prepare_out(dir, cfg)?;
    for (id, ladder) in ladders {
        let manifest = ladder.to_manifest(id.clone());
        write_json(
            &manifest_path(dir, id),
            &ManifestFile {
                manifest: &manifest,
                config: cfg,
            },
        )?;
    }
    Ok(())
}

pub fn ladder(common: &CommonArgs, cfg: &RunConfig, features: &Path, models: &Path) -> CmdResult {
    let dir = common.require_out()?;
    let rows = load_features(features)?;
    for r in &rows {
        check_segment_id(&r.segment_id)?;
    }
    let quality = load_model(models, TargetKind::Quality, cfg)?;
    let time = load_model(models, TargetKind::Time, cfg)?;
    let params = cfg.ladder_params();

    let ladders = rows
        .par_iter()
        .map(|r| {
            let ladder = per_title_ladder(
                &quality,
                &time,
                &r.features,
                &cfg.resolutions,
                &cfg.bitrates,
                &params,
            )
            .or_data(&format!("segment `{}`", r.segment_id))?;
            check_ladder(&ladder, cfg)?;
            Ok((r.segment_id.clone(), ladder))
        })
        .collect::<CmdResult<Vec<_>>>()?;

    write_manifests(dir, cfg, &ladders)?;
    for (id, l) in &ladders {
        let flagged = l.reps().iter().filter(|r| r.over_budget).count();
        println!("{id}: {} representations, {flagged} over budget", l.len());
    }
    Ok(())
}

pub fn baseline(common: &CommonArgs, cfg: &RunConfig, features: &Path) -> CmdResult {
    let dir = common.require_out()?;
    let rows = load_features(features)?;
    let pairing = pairing(cfg)?;
    let ladder = default_hls_ladder(&cfg.bitrates, &pairing).or_data("baseline pairing")?;
    let mut ladders = Vec::with_capacity(rows.len());
    for r in &rows {
        check_segment_id(&r.segment_id)?;
        ladders.push((r.segment_id.clone(), ladder.clone()));
    }
    write_manifests(dir, cfg, &ladders)
}
