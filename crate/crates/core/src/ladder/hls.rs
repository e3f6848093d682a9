use std::io::{Read, Write};

use super::{check_order, Ladder, LadderError, LadderParams, LatencyBudget, Representation};
use crate::forest::VsrTag;

/// Apple HLS authoring rungs snapped onto `{360, 720, 1080, 2160}`, rounding
/// ties down.
pub const DEFAULT_HLS_PAIRING: [(f64, u32); 12] = [
    (0.145, 360),
    (0.3, 360),
    (0.6, 360),
    (0.9, 360),
    (1.6, 720),
    (2.4, 720),
    (3.4, 720),
    (4.5, 1080),
    (5.8, 1080),
    (8.1, 1080),
    (11.6, 2160),
    (16.8, 2160),
];

/// Fixed bitrate to resolution mapping for the baseline ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct Pairing {
    entries: Vec<(f64, u32)>,
}

impl Default for Pairing {
    fn default() -> Self {
        Self {
            entries: DEFAULT_HLS_PAIRING.to_vec(),
        }
    }
}

impl Pairing {
    pub fn new(mut entries: Vec<(f64, u32)>) -> Result<Self, LadderError> {
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(e) = entries
            .iter()
            .find(|(b, r)| !(b.is_finite() && *b > 0.0) || *r == 0)
        {
            return Err(LadderError::InvalidPairing(format!("bad entry {e:?}")));
        }
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(LadderError::InvalidPairing("duplicate bitrate".into()));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(f64, u32)] {
        &self.entries
    }

    pub fn resolution_for(&self, bitrate: f64) -> Option<u32> {
        self.entries
            .iter()
            .find(|(b, _)| *b == bitrate)
            .map(|&(_, r)| r)
    }

    /// Reads `bitrate_mbps,resolution` CSV with a header row.
    pub fn from_csv(reader: impl Read) -> Result<Self, LadderError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| LadderError::InvalidPairing(e.to_string()))?
            .clone();
        if headers.iter().collect::<Vec<_>>() != ["bitrate_mbps", "resolution"] {
            return Err(LadderError::InvalidPairing(format!(
                "expected header `bitrate_mbps,resolution`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut entries = Vec::new();
        for (i, row) in rdr.records().enumerate() {
            let row = row.map_err(|e| LadderError::InvalidPairing(e.to_string()))?;
            let line = i + 2;
            let bitrate: f64 = row[0]
                .trim()
                .parse()
                .map_err(|_| LadderError::InvalidPairing(format!("line {line}: bad bitrate")))?;
            let resolution: u32 = row[1]
                .trim()
                .parse()
                .map_err(|_| LadderError::InvalidPairing(format!("line {line}: bad resolution")))?;
            entries.push((bitrate, resolution));
        }
        Self::new(entries)
    }

    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "bitrate_mbps,resolution")?;
        for (b, r) in &self.entries {
            writeln!(w, "{b},{r}")?;
        }
        Ok(())
    }
}

/// The fixed baseline ladder over `bitrates`. No predictions are attached.
pub fn default_hls_ladder(bitrates: &[f64], pairing: &Pairing) -> Result<Ladder, LadderError> {
    if bitrates.is_empty() {
        return Err(LadderError::EmptyLadder);
    }
    let reps = bitrates
        .iter()
        .map(|&b| {
            pairing
                .resolution_for(b)
                .map(|r| Representation::new(r, b))
                .ok_or(LadderError::PairingMissing(b))
        })
        .collect::<Result<Vec<_>, _>>()?;
    check_order(&reps)?;
    Ladder::new(
        reps,
        LadderParams {
            tau_l: LatencyBudget::UNBOUNDED,
            v_j: None,
            v_t: None,
            vsr_tag: VsrTag::None,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{TABLE_BITRATES, TABLE_RESOLUTIONS};

    #[test]
    fn default_ladder_has_twelve_rungs_from_table_resolutions() {
        let ladder = default_hls_ladder(&TABLE_BITRATES, &Pairing::default()).unwrap();
        assert_eq!(ladder.len(), 12);
        assert!(ladder
            .reps()
            .iter()
            .all(|r| TABLE_RESOLUTIONS.contains(&r.resolution) && r.predicted_vmaf.is_none()));
        assert_eq!(ladder.reps()[4].resolution, 720);
        assert_eq!(ladder.reps()[11].resolution, 2160);
    }

    #[test]
    fn empty_or_unpaired_bitrates() {
        assert_eq!(
            default_hls_ladder(&[], &Pairing::default()).unwrap_err(),
            LadderError::EmptyLadder
        );
        assert_eq!(
            default_hls_ladder(&[0.145, 7.0], &Pairing::default()).unwrap_err(),
            LadderError::PairingMissing(7.0)
        );
    }

    #[test]
    fn custom_pairing_overrides_through_csv() {
        let mut custom = Pairing::default().entries().to_vec();
        custom[0].1 = 720;
        custom[11].1 = 1080;
        let custom = Pairing::new(custom).unwrap();
        let mut buf = Vec::new();
        custom.write_csv(&mut buf).unwrap();
        let parsed = Pairing::from_csv(buf.as_slice()).unwrap();
        assert_eq!(parsed, custom);
        let ladder = default_hls_ladder(&TABLE_BITRATES, &parsed).unwrap();
        let default = default_hls_ladder(&TABLE_BITRATES, &Pairing::default()).unwrap();
        for (i, (a, b)) in ladder.reps().iter().zip(default.reps()).enumerate() {
            let expect_changed = i == 0 || i == 11;
            assert_eq!(a.resolution != b.resolution, expect_changed, "rung {i}");
        }
    }

    #[test]
    fn pairing_csv_errors() {
        assert!(Pairing::from_csv("bitrate,res\n1,360\n".as_bytes()).is_err());
        assert!(Pairing::from_csv("bitrate_mbps,resolution\nx,360\n".as_bytes()).is_err());
        assert!(Pairing::from_csv("bitrate_mbps,resolution\n1,360\n1,720\n".as_bytes()).is_err());
    }
}
