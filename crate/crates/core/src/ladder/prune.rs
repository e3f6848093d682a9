use super::{check_order, Ladder, LadderError};

/// JND-based representation elimination.
///
/// The first representation is always kept. If its predicted VMAF already
/// reaches `v_t` nothing else is kept. Otherwise representations are scanned
/// in bitrate order; one is kept when its VMAF exceeds that of the last kept
/// representation by at least `v_j`, and the scan stops right after keeping
/// one whose VMAF reaches `v_t`. Kept representations stay in input order.
pub fn prune_jnd(ladder: &Ladder, v_j: f64, v_t: f64) -> Result<Ladder, LadderError> {
    let reps = ladder.reps();
    check_order(reps)?;
    let vmaf: Vec<f64> = reps
        .iter()
        .enumerate()
        .map(|(index, r)| {
            r.predicted_vmaf
                .ok_or(LadderError::MissingPrediction { index })
        })
        .collect::<Result<_, _>>()?;

    let mut kept = vec![reps[0]];
    let mut last = 0;
    if vmaf[0] < v_t {
        for t in 1..reps.len() {
            if vmaf[t] - vmaf[last] >= v_j {
                kept.push(reps[t]);
                last = t;
                if vmaf[t] >= v_t {
                    break;
                }
            }
        }
    }

    let mut params = *ladder.params();
    params.v_j = Some(v_j);
    params.v_t = Some(v_t);
    Ladder::new(kept, params)
}
