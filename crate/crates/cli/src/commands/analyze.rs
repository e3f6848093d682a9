use std::collections::HashSet;
use std::path::{Path, PathBuf};

use ladderforge_core::complexity::ComplexityAnalyzer;
use ladderforge_core::ingest::{
    generate_synthetic, parse_raw_luma, parse_y4m, serialize_y4m, Colorspace, SynthSpec,
};
use ladderforge_core::io::{write_features, FeatureRow};
use ladderforge_core::{Framerate, RunConfig, VideoSequence};
use rayon::prelude::*;

use super::emit;
use crate::failure::{data, usage, Classify, CmdResult, Failure};
use crate::settings::{check_segment_id, prepare_out, read_input, CommonArgs};

/// Splits an optional `id=...` entry off a synth spec.
fn split_synth_id(spec: &str, index: usize) -> (String, String) {
    let mut id = None;
    let rest: Vec<&str> = spec
        .split(',')
        .filter(|pair| match pair.strip_prefix("id=") {
            Some(v) => {
                id = Some(v.to_owned());
                false
            }
            None => true,
        })
        .collect();
    (
        id.unwrap_or_else(|| format!("synth{index:03}")),
        rest.join(","),
    )
}

fn parse_synth(specs: &[String]) -> CmdResult<Vec<(String, SynthSpec)>> {
    specs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let (id, rest) = split_synth_id(s, i);
            let spec: SynthSpec = rest.parse().or_usage(&format!("--synth `{s}`"))?;
            Ok((id, spec))
        })
        .collect()
}

fn parse_size(s: &str) -> CmdResult<(usize, usize)> {
    s.split_once('x')
        .and_then(|(w, h)| Some((w.parse().ok()?, h.parse().ok()?)))
        .filter(|&(w, h)| w > 0 && h > 0)
        .ok_or_else(|| usage(format!("--raw-size expects WxH, got `{s}`")))
}

pub fn generate(
    common: &CommonArgs,
    cfg: &RunConfig,
    synth: &[String],
    colorspace: Colorspace,
) -> CmdResult {
    let dir = common.require_out()?;
    let clips = parse_synth(synth)?;
    let mut seen = HashSet::new();
    for (id, _) in &clips {
        check_segment_id(id)?;
        if !seen.insert(id) {
            return Err(usage(format!("segment id `{id}` given twice")));
        }
    }
    prepare_out(dir, cfg)?;
    for (id, spec) in &clips {
        let seq = generate_synthetic(spec).or_usage(&format!("clip `{id}`"))?;
        crate::settings::write_bytes(
            &dir.join(format!("{id}.y4m")),
            &serialize_y4m(&seq, colorspace),
        )?;
    }
    Ok(())
}

enum Job<'a> {
    File(&'a PathBuf),
    Synth(&'a str, &'a SynthSpec),
}

fn segment_id_of(path: &Path) -> CmdResult<String> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .ok_or_else(|| {
            data(format!(
                "cannot derive a segment id from {}",
                path.display()
            ))
        })
}

fn load(
    job: &Job<'_>,
    raw: Option<((usize, usize), Framerate)>,
) -> CmdResult<(String, VideoSequence)> {
    match job {
        Job::File(path) => {
            let id = segment_id_of(path)?;
            let bytes = read_input(path)?;
            let ctx = path.display().to_string();
            let seq = match raw {
                Some(((w, h), fps)) => parse_raw_luma(&bytes, w, h, fps).or_data(&ctx)?,
                None => parse_y4m(&bytes).or_data(&ctx)?,
            };
            Ok((id, seq))
        }
        Job::Synth(id, spec) => Ok((
            id.to_string(),
            generate_synthetic(spec).or_usage(&format!("clip `{id}`"))?,
        )),
    }
}

pub fn analyze(
    common: &CommonArgs,
    cfg: &RunConfig,
    inputs: &[PathBuf],
    synth: &[String],
    raw_size: Option<&str>,
    raw_fps: u32,
) -> CmdResult {
    if inputs.is_empty() && synth.is_empty() {
        return Err(usage(
            "nothing to analyze: pass input files or --synth specs",
        ));
    }
    let raw = match raw_size {
        Some(s) => Some((
            parse_size(s)?,
            Framerate::new(raw_fps, 1).or_usage("--raw-fps")?,
        )),
        None => None,
    };
    let clips = parse_synth(synth)?;
    let analyzer = ComplexityAnalyzer::new(cfg.block_size).or_usage("block size")?;

    let jobs: Vec<Job<'_>> = inputs
        .iter()
        .map(Job::File)
        .chain(clips.iter().map(|(id, spec)| Job::Synth(id, spec)))
        .collect();
    let results: Vec<CmdResult<FeatureRow>> = jobs
        .par_iter()
        .map(|job| {
            let (segment_id, seq) = load(job, raw)?;
            let features = analyzer
                .segment_features(&seq)
                .or_data(&format!("segment `{segment_id}`"))?;
            Ok(FeatureRow {
                segment_id,
                features,
            })
        })
        .collect();

    let mut rows = Vec::new();
    let mut failed = 0usize;
    let mut seen = HashSet::new();
    for r in results {
        match r {
            Ok(row) if !seen.insert(row.segment_id.clone()) => {
                return Err(data(format!("duplicate segment id `{}`", row.segment_id)));
            }
            Ok(row) => rows.push(row),
            Err(Failure::Data(e)) => {
                eprintln!("ladderforge: data error: {e:#}");
                failed += 1;
            }
            Err(other) => return Err(other),
        }
    }
    let mut bytes = Vec::new();
    write_features(&mut bytes, &rows).or_internal("features CSV")?;
    emit(common.out.as_deref(), cfg, "features.csv", &bytes)?;
    if failed > 0 {
        return Err(data(format!("{failed} of {} inputs failed", jobs.len())));
    }
    Ok(())
}
