//! A closed-form stand-in for measured encodes.
//!
//! Real training data comes from encoding every `(resolution, bitrate)` pair
//! and scoring the upscaled output. Without an encoder in the loop, this
//! module supplies smooth, content-dependent quality and time surfaces with
//! seeded measurement noise, so the pipeline can be trained and evaluated
//! end to end.
//!
//! Quality rises with bitrate towards a resolution-dependent ceiling; the
//! ceiling penalty for low resolutions shrinks when the client upscales
//! with a learned model. The bitrate needed to approach the ceiling grows
//! with pixel count and content complexity. Encoding time grows with pixel
//! count, slowly with bitrate, and with complexity.

use serde::{Deserialize, Serialize};

use crate::complexity::SegmentFeatures;
use crate::forest::{TargetKind, TrainingRecord, VsrTag};
use crate::metrics::EvaluatedRep;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// VMAF lost at 360p relative to 2160p without upscaling help.
    pub ceiling_penalty: f64,
    /// Fraction of that penalty recovered by learned upscaling.
    pub vsr_recovery: f64,
    /// Mbps needed at 1080p for simple content to reach `1 - 1/e` of the ceiling.
    pub rate_scale: f64,
    /// Seconds to encode a 1080p segment of simple content.
    pub time_scale: f64,
    /// Texture energy at which content counts as twice as hard.
    pub e_ref: f64,
    /// Temporal gradient at which content counts as twice as hard.
    pub h_ref: f64,
    pub vmaf_noise: f64,
    /// Relative standard deviation of time measurements.
    pub time_noise: f64,
}

impl Default for GroundTruth {
    fn default() -> Self {
        Self {
            ceiling_penalty: 40.0,
            vsr_recovery: 0.5,
            rate_scale: 1.2,
            time_scale: 0.6,
            e_ref: 40.0,
            h_ref: 2.0,
            vmaf_noise: 1.0,
            time_noise: 0.03,
        }
    }
}

/// Noise-free quality and time for a single encode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub vmaf: f64,
    pub psnr: f64,
    pub time_s: f64,
}

fn hash_key(seed: u64, segment_id: &str, resolution: u32, bitrate: f64, salt: u64) -> u64 {
    // FNV-1a over the key, then one SplitMix64 step to spread the bits
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for b in bytes {
            h ^= u64::from(*b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    eat(&seed.to_le_bytes());
    eat(segment_id.as_bytes());
    eat(&resolution.to_le_bytes());
    eat(&bitrate.to_bits().to_le_bytes());
    eat(&salt.to_le_bytes());
    SplitMix64::new(h).next_u64()
}

impl GroundTruth {
    pub fn difficulty(&self, f: &SegmentFeatures) -> f64 {
        1.0 + f.e_y.max(0.0) / self.e_ref + f.h.max(0.0) / self.h_ref
    }

    pub fn outcome(
        &self,
        f: &SegmentFeatures,
        resolution: u32,
        bitrate: f64,
        vsr: VsrTag,
    ) -> Outcome {
        let scale = f64::from(resolution) / 1080.0;
        let d = self.difficulty(f);
        let penalty = match vsr {
            VsrTag::None => self.ceiling_penalty,
            VsrTag::Fsrcnn => self.ceiling_penalty * (1.0 - self.vsr_recovery),
        };
        let below_top = (2160.0 / f64::from(resolution)).log2().max(0.0) / 6f64.log2();
        let ceiling = 100.0 - penalty * below_top;
        let needed = self.rate_scale * scale.powf(1.5) * d;
        let vmaf = (ceiling * (1.0 - (-bitrate / needed).exp())).clamp(0.0, 100.0);
        // PSNR does not see the perceptual gain of learned upscaling
        let plain = 100.0 - self.ceiling_penalty * below_top;
        let psnr = 22.0 + 0.2 * plain * (1.0 - (-bitrate / needed).exp());
        let time_s = self.time_scale * scale * scale * (0.5 + bitrate / 8.0).powf(0.3) * d;
        Outcome { vmaf, psnr, time_s }
    }

    /// One noisy measurement, reproducible from `(seed, segment_id, r, b)`.
    pub fn measure(
        &self,
        segment_id: &str,
        f: &SegmentFeatures,
        resolution: u32,
        bitrate: f64,
        vsr: VsrTag,
        seed: u64,
    ) -> Outcome {
        let o = self.outcome(f, resolution, bitrate, vsr);
        let salt = match vsr {
            VsrTag::None => 0,
            VsrTag::Fsrcnn => 1,
        };
        let mut rng = SplitMix64::new(hash_key(seed, segment_id, resolution, bitrate, salt));
        let (n1, n2) = (rng.gaussian(), rng.gaussian());
        Outcome {
            vmaf: (o.vmaf + self.vmaf_noise * n1).clamp(0.0, 100.0),
            psnr: o.psnr + 0.1 * self.vmaf_noise * n1,
            time_s: o.time_s * (1.0 + self.time_noise * n2).max(0.05),
        }
    }

    pub fn evaluated_rep(
        &self,
        segment_id: &str,
        f: &SegmentFeatures,
        resolution: u32,
        bitrate: f64,
        vsr: VsrTag,
        seed: u64,
    ) -> EvaluatedRep {
        let m = self.measure(segment_id, f, resolution, bitrate, vsr, seed);
        EvaluatedRep {
            bitrate_mbps: bitrate,
            resolution,
            psnr: Some(m.psnr),
            vmaf: Some(m.vmaf),
            encode_time_s: m.time_s,
        }
    }

    /// Quality and time records for every `(r, b)` pair and VSR tag.
    pub fn training_records(
        &self,
        segment_id: &str,
        f: &SegmentFeatures,
        resolutions: &[u32],
        bitrates: &[f64],
        tags: &[VsrTag],
        seed: u64,
    ) -> Vec<TrainingRecord> {
        let mut out = Vec::with_capacity(2 * tags.len() * resolutions.len() * bitrates.len());
        for &tag in tags {
            for &r in resolutions {
                for &b in bitrates {
                    let m = self.measure(segment_id, f, r, b, tag, seed);
                    for (kind, target) in
                        [(TargetKind::Quality, m.vmaf), (TargetKind::Time, m.time_s)]
                    {
                        out.push(
                            TrainingRecord::new(segment_id, *f, r, b, tag, kind, target)
                                .expect("ground truth produces valid records"),
                        );
                    }
                }
            }
        }
        out
    }
}
