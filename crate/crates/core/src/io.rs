//! CSV schemas shared by the command-line tools.
//!
//! * features: `segment_id,E_Y,h,L_Y`
//! * training: `segment_id,E_Y,h,L_Y,resolution,bitrate_mbps,vsr_tag,target_kind,target`
//! * evaluation: `segment_id,bitrate_mbps,resolution,psnr,vmaf,encode_time_s`
//!   where an empty `psnr` or `vmaf` cell means "not measured".
//!
//! Rows are reported 1-based counting the header, so the first data row is row 2.

use std::io::{Read, Write};

use thiserror::Error;

use crate::complexity::SegmentFeatures;
use crate::forest::{TargetKind, TrainingRecord, VsrTag};
use crate::metrics::{EvaluatedLadder, EvaluatedRep};

pub const FEATURES_HEADER: [&str; 4] = ["segment_id", "E_Y", "h", "L_Y"];
pub const TRAINING_HEADER: [&str; 9] = [
    "segment_id",
    "E_Y",
    "h",
    "L_Y",
    "resolution",
    "bitrate_mbps",
    "vsr_tag",
    "target_kind",
    "target",
];
pub const EVALUATION_HEADER: [&str; 6] = [
    "segment_id",
    "bitrate_mbps",
    "resolution",
    "psnr",
    "vmaf",
    "encode_time_s",
];

#[derive(Debug, Error)]
pub enum IoError {
    #[error("expected header `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("row {row}: {msg}")]
    Row { row: usize, msg: String },
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl IoError {
    /// True for schema and content problems, false for I/O failures.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, IoError::Io(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub segment_id: String,
    pub features: SegmentFeatures,
}

fn reader(r: impl Read, header: &[&str]) -> Result<csv::Reader<impl Read>, IoError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(r);
    let found: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if found != header {
        return Err(IoError::Header {
            expected: header.join(","),
            found: found.join(","),
        });
    }
    Ok(rdr)
}

fn field<T: std::str::FromStr>(
    rec: &csv::StringRecord,
    i: usize,
    name: &str,
    row: usize,
) -> Result<T, IoError> {
    let raw = rec.get(i).unwrap_or("");
    raw.parse().map_err(|_| IoError::Row {
        row,
        msg: format!("cannot parse {name} `{raw}`"),
    })
}

fn finite(v: f64, name: &str, row: usize) -> Result<f64, IoError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(IoError::Row {
            row,
            msg: format!("{name} must be finite"),
        })
    }
}

fn segment_id(rec: &csv::StringRecord, row: usize) -> Result<String, IoError> {
    let id = rec.get(0).unwrap_or("");
    if id.is_empty() {
        return Err(IoError::Row {
            row,
            msg: "empty segment_id".into(),
        });
    }
    Ok(id.to_owned())
}

fn parse_features(rec: &csv::StringRecord, row: usize) -> Result<SegmentFeatures, IoError> {
    Ok(SegmentFeatures {
        e_y: finite(field(rec, 1, "E_Y", row)?, "E_Y", row)?,
        h: finite(field(rec, 2, "h", row)?, "h", row)?,
        l_y: finite(field(rec, 3, "L_Y", row)?, "L_Y", row)?,
    })
}

pub fn read_features(r: impl Read) -> Result<Vec<FeatureRow>, IoError> {
    let mut rdr = reader(r, &FEATURES_HEADER)?;
    let mut out: Vec<FeatureRow> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec?;
        let id = segment_id(&rec, row)?;
        if !seen.insert(id.clone()) {
            return Err(IoError::Row {
                row,
                msg: format!("duplicate segment_id `{id}`"),
            });
        }
        out.push(FeatureRow {
            segment_id: id,
            features: parse_features(&rec, row)?,
        });
    }
    Ok(out)
}

pub fn write_features(w: impl Write, rows: &[FeatureRow]) -> Result<(), IoError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(FEATURES_HEADER)?;
    for r in rows {
        let f = &r.features;
        wtr.write_record([
            r.segment_id.clone(),
            f.e_y.to_string(),
            f.h.to_string(),
            f.l_y.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_training(r: impl Read) -> Result<Vec<TrainingRecord>, IoError> {
    let mut rdr = reader(r, &TRAINING_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec?;
        let id = segment_id(&rec, row)?;
        let features = parse_features(&rec, row)?;
        let resolution: u32 = field(&rec, 4, "resolution", row)?;
        let bitrate: f64 = field(&rec, 5, "bitrate_mbps", row)?;
        let vsr: VsrTag = field(&rec, 6, "vsr_tag", row)?;
        let kind: TargetKind = field(&rec, 7, "target_kind", row)?;
        let target: f64 = field(&rec, 8, "target", row)?;
        let record = TrainingRecord::new(id, features, resolution, bitrate, vsr, kind, target)
            .map_err(|e| IoError::Row {
                row,
                msg: e.to_string(),
            })?;
        out.push(record);
    }
    Ok(out)
}

pub fn write_training(w: impl Write, records: &[TrainingRecord]) -> Result<(), IoError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(TRAINING_HEADER)?;
    for r in records {
        let f = &r.features;
        wtr.write_record([
            r.segment_id.clone(),
            f.e_y.to_string(),
            f.h.to_string(),
            f.l_y.to_string(),
            r.resolution.to_string(),
            r.bitrate_mbps.to_string(),
            r.vsr_tag.to_string(),
            r.target_kind.to_string(),
            r.target.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

fn optional_quality(
    rec: &csv::StringRecord,
    i: usize,
    name: &str,
    row: usize,
) -> Result<Option<f64>, IoError> {
    match rec.get(i).unwrap_or("") {
        "" => Ok(None),
        _ => Ok(Some(finite(field(rec, i, name, row)?, name, row)?)),
    }
}

/// Groups rows into ladders in order of first appearance.
pub fn read_evaluation(r: impl Read) -> Result<Vec<EvaluatedLadder>, IoError> {
    let mut rdr = reader(r, &EVALUATION_HEADER)?;
    let mut order: Vec<String> = Vec::new();
    let mut groups: std::collections::HashMap<String, Vec<EvaluatedRep>> = Default::default();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec?;
        let id = segment_id(&rec, row)?;
        let rep = EvaluatedRep {
            bitrate_mbps: field(&rec, 1, "bitrate_mbps", row)?,
            resolution: field(&rec, 2, "resolution", row)?,
            psnr: optional_quality(&rec, 3, "psnr", row)?,
            vmaf: optional_quality(&rec, 4, "vmaf", row)?,
            encode_time_s: field(&rec, 5, "encode_time_s", row)?,
        };
        if !(rep.bitrate_mbps.is_finite() && rep.bitrate_mbps > 0.0) {
            return Err(IoError::Row {
                row,
                msg: "bitrate_mbps must be positive".into(),
            });
        }
        if !(rep.encode_time_s.is_finite() && rep.encode_time_s >= 0.0) {
            return Err(IoError::Row {
                row,
                msg: "encode_time_s must be non-negative".into(),
            });
        }
        if !groups.contains_key(&id) {
            order.push(id.clone());
        }
        groups.entry(id).or_default().push(rep);
    }
    order
        .into_iter()
        .map(|id| {
            let reps = groups.remove(&id).unwrap_or_default();
            EvaluatedLadder::new(id.clone(), reps).map_err(|e| IoError::Row {
                row: 0,
                msg: format!("segment `{id}`: {e}"),
            })
        })
        .collect()
}

pub fn write_evaluation(w: impl Write, ladders: &[EvaluatedLadder]) -> Result<(), IoError> {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(EVALUATION_HEADER)?;
    for l in ladders {
        for r in &l.reps {
            wtr.write_record([
                l.segment_id.clone(),
                r.bitrate_mbps.to_string(),
                r.resolution.to_string(),
                opt(r.psnr),
                opt(r.vmaf),
                r.encode_time_s.to_string(),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}
