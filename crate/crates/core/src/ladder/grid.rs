use super::LadderError;
use crate::complexity::SegmentFeatures;
use crate::forest::{FeatureVector, ForestModel, TargetKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCell {
    pub vmaf: f64,
    pub time: f64,
}

/// Predicted `(vmaf, time)` for every `(resolution, bitrate)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionGrid {
    resolutions: Vec<u32>,
    bitrates: Vec<f64>,
    /// row-major by resolution: `cells[r * bitrates.len() + b]`
    cells: Vec<GridCell>,
}

pub(crate) fn check_sets(resolutions: &[u32], bitrates: &[f64]) -> Result<(), LadderError> {
    let bad = |m: &str| Err(LadderError::InvalidSets(m.into()));
    if resolutions.is_empty() || bitrates.is_empty() {
        return bad("resolution and bitrate sets must be nonempty");
    }
    if resolutions.contains(&0) || resolutions.windows(2).any(|w| w[0] >= w[1]) {
        return bad("resolutions must be positive and strictly ascending");
    }
    if bitrates.iter().any(|b| !(b.is_finite() && *b > 0.0))
        || bitrates.windows(2).any(|w| !(w[0] < w[1]))
    {
        return bad("bitrates must be positive and strictly ascending");
    }
    Ok(())
}

impl PredictionGrid {
    pub fn new(
        resolutions: Vec<u32>,
        bitrates: Vec<f64>,
        cells: Vec<GridCell>,
    ) -> Result<Self, LadderError> {
        check_sets(&resolutions, &bitrates)?;
        if cells.len() != resolutions.len() * bitrates.len() {
            return Err(LadderError::InvalidGrid(format!(
                "{} cells for a {}x{} grid",
                cells.len(),
                resolutions.len(),
                bitrates.len()
            )));
        }
        if let Some(c) = cells.iter().find(|c| {
            !(c.vmaf.is_finite() && (0.0..=100.0).contains(&c.vmaf))
                || !(c.time.is_finite() && c.time >= 0.0)
        }) {
            return Err(LadderError::InvalidGrid(format!(
                "cell out of range: {c:?}"
            )));
        }
        Ok(Self {
            resolutions,
            bitrates,
            cells,
        })
    }

    pub fn resolutions(&self) -> &[u32] {
        &self.resolutions
    }

    pub fn bitrates(&self) -> &[f64] {
        &self.bitrates
    }

    pub fn cell(&self, r_idx: usize, b_idx: usize) -> GridCell {
        self.cells[r_idx * self.bitrates.len() + b_idx]
    }

    pub fn bitrate_index(&self, bitrate: f64) -> Result<usize, LadderError> {
        self.bitrates
            .iter()
            .position(|&b| b == bitrate)
            .ok_or(LadderError::UnknownBitrate(bitrate))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

pub fn predict_grid(
    quality_model: &ForestModel,
    time_model: &ForestModel,
    features: &SegmentFeatures,
    resolutions: &[u32],
    bitrates: &[f64],
) -> Result<PredictionGrid, LadderError> {
    if quality_model.vsr_tag != time_model.vsr_tag {
        return Err(LadderError::ModelMismatch(format!(
            "quality model is for `{}`, time model for `{}`",
            quality_model.vsr_tag, time_model.vsr_tag
        )));
    }
    if quality_model.target_kind != TargetKind::Quality
        || time_model.target_kind != TargetKind::Time
    {
        return Err(LadderError::ModelMismatch(
            "expected a quality model and a time model".into(),
        ));
    }
    check_sets(resolutions, bitrates)?;
    let mut cells = Vec::with_capacity(resolutions.len() * bitrates.len());
    for &r in resolutions {
        for &b in bitrates {
            let x = FeatureVector::new(features, r, b);
            cells.push(GridCell {
                vmaf: quality_model.predict(&x),
                time: time_model.predict(&x),
            });
        }
    }
    PredictionGrid::new(resolutions.to_vec(), bitrates.to_vec(), cells)
}
