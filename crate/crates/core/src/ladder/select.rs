use super::{Ladder, LadderError, LadderParams, LatencyBudget, PredictionGrid, Representation};
use crate::forest::VsrTag;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selection {
    pub resolution: u32,
    pub over_budget: bool,
}

/// Highest predicted VMAF among resolutions whose predicted time fits the
/// budget; equal VMAF goes to the lower resolution. With no feasible
/// resolution the fastest one is returned with `over_budget` set (equal
/// times again prefer the lower resolution).
pub fn select_resolution(
    grid: &PredictionGrid,
    bitrate: f64,
    tau_l: LatencyBudget,
) -> Result<Selection, LadderError> {
    let b = grid.bitrate_index(bitrate)?;
    Ok(select_at(grid, b, tau_l).1)
}

fn select_at(grid: &PredictionGrid, b: usize, tau_l: LatencyBudget) -> (usize, Selection) {
    let mut best: Option<(usize, f64)> = None;
    let mut fastest = (0, f64::INFINITY);
    for r in 0..grid.resolutions().len() {
        let cell = grid.cell(r, b);
        if cell.time < fastest.1 {
            fastest = (r, cell.time);
        }
        if tau_l.admits(cell.time) && best.is_none_or(|(_, v)| cell.vmaf > v) {
            best = Some((r, cell.vmaf));
        }
    }
    let (r, over_budget) = match best {
        Some((r, _)) => (r, false),
        None => (fastest.0, true),
    };
    (
        r,
        Selection {
            resolution: grid.resolutions()[r],
            over_budget,
        },
    )
}

/// One representation per bitrate in `bitrates`, in ascending order, with the
/// grid's predictions attached. Pruning parameters are left unset.
pub fn build_ladder(
    grid: &PredictionGrid,
    bitrates: &[f64],
    tau_l: LatencyBudget,
    vsr_tag: VsrTag,
) -> Result<Ladder, LadderError> {
    let mut reps = Vec::with_capacity(bitrates.len());
    for &bitrate in bitrates {
        let b = grid.bitrate_index(bitrate)?;
        let (r, sel) = select_at(grid, b, tau_l);
        let cell = grid.cell(r, b);
        reps.push(Representation {
            bitrate_mbps: bitrate,
            resolution: sel.resolution,
            predicted_vmaf: Some(cell.vmaf),
            predicted_time_s: Some(cell.time),
            over_budget: sel.over_budget,
        });
    }
    Ladder::new(
        reps,
        LadderParams {
            tau_l,
            v_j: None,
            v_t: None,
            vsr_tag,
        },
    )
}
