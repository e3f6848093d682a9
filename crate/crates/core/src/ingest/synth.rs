use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Framerate, IngestError, LumaFrame, VideoSequence};
use crate::rng::SplitMix64;

/// Luma levels of the checkerboard (studio-range white and black).
pub const CHECKER_HIGH: u8 = 235;
pub const CHECKER_LOW: u8 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Pattern {
    Constant {
        level: u8,
    },
    /// `235` where `row / period + col / period` is even, else `16`.
    Checkerboard {
        period: usize,
    },
    /// `round(128 + sigma * N(0, 1))`, clamped to `[0, 255]`, i.i.d. per sample.
    Noise {
        sigma: f64,
    },
    /// Horizontal sawtooth ramp of one period per frame width, shifted by
    /// `velocity` pixels per frame.
    MovingGradient {
        velocity: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub framerate: u32,
    pub pattern: Pattern,
    pub seed: u64,
}

/// Build a clip from `spec`. Pure in `(spec, seed)`.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<VideoSequence, IngestError> {
    if spec.width == 0 || spec.height == 0 || spec.frames == 0 {
        return Err(IngestError::InvalidSpec(format!(
            "{}x{} with {} frames",
            spec.width, spec.height, spec.frames
        )));
    }
    let framerate = Framerate::new(spec.framerate, 1)?;
    let (w, h) = (spec.width, spec.height);
    let mut rng = SplitMix64::new(spec.seed);

    let frames = (0..spec.frames)
        .map(|t| {
            let samples: Vec<u8> = match spec.pattern {
                Pattern::Constant { level } => vec![level; w * h],
                Pattern::Checkerboard { period } => {
                    if period == 0 {
                        return Err(IngestError::InvalidSpec("checkerboard period 0".into()));
                    }
                    (0..h)
                        .flat_map(|i| {
                            (0..w).map(move |j| {
                                if (i / period + j / period) % 2 == 0 {
                                    CHECKER_HIGH
                                } else {
                                    CHECKER_LOW
                                }
                            })
                        })
                        .collect()
                }
                Pattern::Noise { sigma } => {
                    if !(sigma.is_finite() && sigma >= 0.0) {
                        return Err(IngestError::InvalidSpec(format!("noise sigma {sigma}")));
                    }
                    (0..w * h)
                        .map(|_| (128.0 + sigma * rng.gaussian()).round().clamp(0.0, 255.0) as u8)
                        .collect()
                }
                Pattern::MovingGradient { velocity } => {
                    if !velocity.is_finite() {
                        return Err(IngestError::InvalidSpec(format!("velocity {velocity}")));
                    }
                    let row: Vec<u8> = (0..w)
                        .map(|x| {
                            let pos = x as f64 + velocity * t as f64;
                            ((pos * 256.0 / w as f64).floor()).rem_euclid(256.0) as u8
                        })
                        .collect();
                    row.repeat(h)
                }
            };
            LumaFrame::new(w, h, samples)
        })
        .collect::<Result<Vec<_>, _>>()?;

    VideoSequence::new(frames, framerate)
}

impl FromStr for SynthSpec {
    type Err = IngestError;

    /// Parses `key=value` pairs separated by commas, e.g.
    /// `pattern=noise,sigma=20,width=64,height=64,frames=10,fps=30,seed=7`.
    /// Defaults: 64x64, 10 frames, 30 fps, seed 0.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |msg: String| IngestError::InvalidSpec(msg);
        let mut width = 64;
        let mut height = 64;
        let mut frames = 10;
        let mut framerate = 30;
        let mut seed = 0;
        let mut pattern = None;
        let mut level = 128u8;
        let mut period = 8usize;
        let mut sigma = 20.0;
        let mut velocity = 1.0;

        for pair in s.split(',').filter(|p| !p.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got `{pair}`")))?;
            let num_err = |_| bad(format!("bad value for `{key}`: `{value}`"));
            match key {
                "pattern" => pattern = Some(value.to_owned()),
                "width" | "w" => width = value.parse().map_err(num_err)?,
                "height" | "h" => height = value.parse().map_err(num_err)?,
                "frames" => frames = value.parse().map_err(num_err)?,
                "fps" => framerate = value.parse().map_err(num_err)?,
                "seed" => seed = value.parse().map_err(num_err)?,
                "level" => level = value.parse().map_err(num_err)?,
                "period" => period = value.parse().map_err(num_err)?,
                "sigma" => {
                    sigma = value
                        .parse()
                        .map_err(|_| bad(format!("bad sigma `{value}`")))?
                }
                "velocity" => {
                    velocity = value
                        .parse()
                        .map_err(|_| bad(format!("bad velocity `{value}`")))?
                }
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }

        let pattern = match pattern.as_deref() {
            Some("constant") => Pattern::Constant { level },
            Some("checkerboard") => Pattern::Checkerboard { period },
            Some("noise") => Pattern::Noise { sigma },
            Some("moving_gradient") => Pattern::MovingGradient { velocity },
            Some(other) => return Err(bad(format!("unknown pattern `{other}`"))),
            None => return Err(bad("missing pattern".into())),
        };
        Ok(Self {
            width,
            height,
            frames,
            framerate,
            pattern,
            seed,
        })
    }
}
