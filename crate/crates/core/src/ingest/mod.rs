//! Luma-only video ingestion: Y4M and raw planar input plus synthetic clips.
//!
//! Only the luma plane is kept. Chroma bytes are consumed to keep stream
//! framing correct and then dropped.

mod raw;
mod synth;
mod y4m;

pub use raw::parse_raw_luma;
pub use synth::{generate_synthetic, Pattern, SynthSpec};
pub use y4m::{parse_y4m, parse_y4m_with, serialize_y4m, Colorspace, ParseOptions};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngestError {
    #[error("malformed Y4M header: {0}")]
    MalformedHeader(String),
    #[error("unsupported colorspace `{0}` (8-bit 420, 422, 444 and mono only)")]
    UnsupportedColorspace(String),
    #[error("stream ends inside frame {frame}: needed {needed} bytes, {available} left")]
    TruncatedFrame {
        frame: usize,
        needed: usize,
        available: usize,
    },
    #[error("stream has a header but no FRAME marker")]
    ZeroFrames,
    #[error("malformed frame header at byte {offset}")]
    MalformedFrameHeader { offset: usize },
    #[error("{0} bytes of trailing data after the last frame")]
    TrailingData(usize),
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
}

/// Frame rate as an exact rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Framerate {
    pub num: u32,
    pub den: u32,
}

impl Framerate {
    pub fn new(num: u32, den: u32) -> Result<Self, IngestError> {
        if num == 0 || den == 0 {
            return Err(IngestError::InvalidSpec(format!(
                "framerate {num}:{den} must be positive"
            )));
        }
        Ok(Self { num, den })
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// One 8-bit luma plane, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LumaFrame {
    width: usize,
    height: usize,
    samples: Vec<u8>,
}

impl LumaFrame {
    pub fn new(width: usize, height: usize, samples: Vec<u8>) -> Result<Self, IngestError> {
        if width == 0 || height == 0 {
            return Err(IngestError::InvalidFrame(format!(
                "dimensions {width}x{height} must be positive"
            )));
        }
        if samples.len() != width * height {
            return Err(IngestError::InvalidFrame(format!(
                "{} samples for a {width}x{height} frame",
                samples.len()
            )));
        }
        Ok(Self {
            width,
            height,
            samples,
        })
    }

    pub fn filled(width: usize, height: usize, level: u8) -> Result<Self, IngestError> {
        Self::new(width, height, vec![level; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    /// Sample at row `y`, column `x`.
    pub fn at(&self, x: usize, y: usize) -> u8 {
        self.samples[y * self.width + x]
    }
}

/// An immutable run of equally sized luma frames.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VideoSequence {
    frames: Vec<LumaFrame>,
    framerate: Framerate,
}

impl VideoSequence {
    pub fn new(frames: Vec<LumaFrame>, framerate: Framerate) -> Result<Self, IngestError> {
        let first = frames.first().ok_or(IngestError::ZeroFrames)?;
        let (w, h) = (first.width, first.height);
        if let Some(i) = frames.iter().position(|f| f.width != w || f.height != h) {
            return Err(IngestError::InvalidFrame(format!(
                "frame {i} is {}x{}, expected {w}x{h}",
                frames[i].width, frames[i].height
            )));
        }
        Ok(Self { frames, framerate })
    }

    pub fn frames(&self) -> &[LumaFrame] {
        &self.frames
    }

    pub fn framerate(&self) -> Framerate {
        self.framerate
    }

    pub fn width(&self) -> usize {
        self.frames[0].width
    }

    pub fn height(&self) -> usize {
        self.frames[0].height
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    /// Always false; construction rejects empty sequences.
    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Seconds covered by the sequence.
    pub fn duration(&self) -> f64 {
        self.frames.len() as f64 / self.framerate.as_f64()
    }

    /// A copy with frame order reversed.
    pub fn reversed(&self) -> Self {
        let mut frames = self.frames.clone();
        frames.reverse();
        Self {
            frames,
            framerate: self.framerate,
        }
    }
}
