//! DCT-energy spatiotemporal complexity features.
//!
//! Each frame is tiled into `w x w` blocks (zero-padded at the right and
//! bottom borders). For a block `B` with orthonormal 2-D DCT-II coefficients
//! `D(i, j)`, the texture energy is
//!
//! ```text
//! H = sum over (i, j) != (0, 0) of exp(|((i * j) / w^2)^2 - 1|) * |D(i, j)|
//! ```
//!
//! Per frame, with `C` blocks:
//!
//! * `texture_energy = sum_k H_k / (C * w^2)`
//! * `temporal_gradient = sum_k |H_k - H'_k| / (C * w^2)` against the previous
//!   frame's block energies `H'_k` (0 for the first frame)
//! * `brightness` = plain mean of the unpadded luma samples
//!
//! A segment reports `E_Y` and `L_Y` as means over all frames and `h` as the
//! mean over frames that have a predecessor.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{LumaFrame, VideoSequence};

pub const DEFAULT_BLOCK_SIZE: usize = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComplexityError {
    #[error("block has {got} samples, expected {expected}")]
    BlockSizeMismatch { expected: usize, got: usize },
    #[error("frame is {got:?}, previous frame is {expected:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("sequence has no frames")]
    EmptySequence,
    #[error("block size must be at least 2, got {0}")]
    InvalidBlockSize(usize),
    #[error("plane of {width}x{height} needs {expected} samples, got {got}")]
    PlaneSizeMismatch {
        width: usize,
        height: usize,
        expected: usize,
        got: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameComplexity {
    pub texture_energy: f64,
    pub temporal_gradient: f64,
    pub brightness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentFeatures {
    #[serde(rename = "E_Y")]
    pub e_y: f64,
    pub h: f64,
    #[serde(rename = "L_Y")]
    pub l_y: f64,
}

/// Per-frame result that also carries block energies for the next frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneAnalysis {
    pub complexity: FrameComplexity,
    pub block_energies: Vec<f64>,
}

/// Precomputed DCT basis and weights for one block size.
#[derive(Debug, Clone)]
pub struct ComplexityAnalyzer {
    block_size: usize,
    /// basis[k * w + n] = alpha(k) * cos(pi * (2n + 1) * k / 2w)
    basis: Vec<f64>,
    weights: Vec<f64>,
}

impl Default for ComplexityAnalyzer {
    fn default() -> Self {
        Self::new(DEFAULT_BLOCK_SIZE).expect("default block size is valid")
    }
}

impl ComplexityAnalyzer {
    pub fn new(block_size: usize) -> Result<Self, ComplexityError> {
        if block_size < 2 {
            return Err(ComplexityError::InvalidBlockSize(block_size));
        }
        let w = block_size;
        let wf = w as f64;
        let mut basis = vec![0.0; w * w];
        for k in 0..w {
            let alpha = if k == 0 {
                (1.0 / wf).sqrt()
            } else {
                (2.0 / wf).sqrt()
            };
            for n in 0..w {
                basis[k * w + n] = alpha
                    * (std::f64::consts::PI * (2 * n + 1) as f64 * k as f64 / (2.0 * wf)).cos();
            }
        }
        let mut weights = vec![0.0; w * w];
        let w2 = wf * wf;
        for i in 0..w {
            for j in 0..w {
                let r = (i * j) as f64 / w2;
                weights[i * w + j] = (r * r - 1.0).abs().exp();
            }
        }
        weights[0] = 0.0;
        Ok(Self {
            block_size,
            basis,
            weights,
        })
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    /// Weight applied to coefficient `(i, j)`; zero for DC.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.block_size + j]
    }

    /// Orthonormal 2-D DCT-II of a row-major `w x w` block.
    pub fn dct2d(&self, block: &[f64]) -> Result<Vec<f64>, ComplexityError> {
        let w = self.block_size;
        if block.len() != w * w {
            return Err(ComplexityError::BlockSizeMismatch {
                expected: w * w,
                got: block.len(),
            });
        }
        // rows: tmp[r][k] = sum_n block[r][n] * basis[k][n]
        let mut tmp = vec![0.0; w * w];
        for r in 0..w {
            let row = &block[r * w..(r + 1) * w];
            for k in 0..w {
                let b = &self.basis[k * w..(k + 1) * w];
                tmp[r * w + k] = row.iter().zip(b).map(|(x, c)| x * c).sum();
            }
        }
        // columns: out[i][k] = sum_r basis[i][r] * tmp[r][k]
        let mut out = vec![0.0; w * w];
        for i in 0..w {
            let b = &self.basis[i * w..(i + 1) * w];
            for (r, &c) in b.iter().enumerate() {
                let src = &tmp[r * w..(r + 1) * w];
                let dst = &mut out[i * w..(i + 1) * w];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += c * s;
                }
            }
        }
        Ok(out)
    }

    pub fn block_texture_energy(&self, block: &[f64]) -> Result<f64, ComplexityError> {
        // Removing the mean only moves the DC term, which carries no weight,
        // and makes flat blocks transform to exact zeros.
        let mean = block.iter().sum::<f64>() / block.len().max(1) as f64;
        let centered: Vec<f64> = block.iter().map(|x| x - mean).collect();
        let coefs = self.dct2d(&centered)?;
        Ok(coefs
            .iter()
            .zip(&self.weights)
            .map(|(c, wt)| wt * c.abs())
            .sum())
    }

    /// Block energies of a real-valued plane, row-major over the block grid.
    pub fn block_energies(
        &self,
        width: usize,
        height: usize,
        samples: &[f64],
    ) -> Result<Vec<f64>, ComplexityError> {
        if samples.len() != width * height {
            return Err(ComplexityError::PlaneSizeMismatch {
                width,
                height,
                expected: width * height,
                got: samples.len(),
            });
        }
        let w = self.block_size;
        let blocks_x = width.div_ceil(w);
        let blocks_y = height.div_ceil(w);
        let mut tile = vec![0.0; w * w];
        let mut energies = Vec::with_capacity(blocks_x * blocks_y);
        for by in 0..blocks_y {
            for bx in 0..blocks_x {
                tile.fill(0.0);
                let x0 = bx * w;
                let y0 = by * w;
                let cols = w.min(width - x0);
                for r in 0..w.min(height - y0) {
                    let src = &samples[(y0 + r) * width + x0..(y0 + r) * width + x0 + cols];
                    tile[r * w..r * w + cols].copy_from_slice(src);
                }
                energies.push(self.block_texture_energy(&tile)?);
            }
        }
        Ok(energies)
    }

    /// Features of a real-valued plane given the previous plane's block energies.
    pub fn analyze_plane(
        &self,
        width: usize,
        height: usize,
        samples: &[f64],
        prev_energies: Option<&[f64]>,
    ) -> Result<PlaneAnalysis, ComplexityError> {
        let energies = self.block_energies(width, height, samples)?;
        let norm = (energies.len() * self.block_size * self.block_size) as f64;
        let texture_energy = energies.iter().sum::<f64>() / norm;
        let temporal_gradient = match prev_energies {
            Some(prev) => {
                if prev.len() != energies.len() {
                    return Err(ComplexityError::BlockSizeMismatch {
                        expected: energies.len(),
                        got: prev.len(),
                    });
                }
                energies
                    .iter()
                    .zip(prev)
                    .map(|(a, b)| (a - b).abs())
                    .sum::<f64>()
                    / norm
            }
            None => 0.0,
        };
        let brightness = samples.iter().sum::<f64>() / samples.len() as f64;
        Ok(PlaneAnalysis {
            complexity: FrameComplexity {
                texture_energy,
                temporal_gradient,
                brightness,
            },
            block_energies: energies,
        })
    }

    pub fn frame_complexity(
        &self,
        frame: &LumaFrame,
        prev: Option<&LumaFrame>,
    ) -> Result<FrameComplexity, ComplexityError> {
        let prev_energies = match prev {
            Some(p) => {
                if (p.width(), p.height()) != (frame.width(), frame.height()) {
                    return Err(ComplexityError::DimensionMismatch {
                        expected: (p.width(), p.height()),
                        got: (frame.width(), frame.height()),
                    });
                }
                Some(self.block_energies(p.width(), p.height(), &to_real(p))?)
            }
            None => None,
        };
        let analysis = self.analyze_plane(
            frame.width(),
            frame.height(),
            &to_real(frame),
            prev_energies.as_deref(),
        )?;
        Ok(analysis.complexity)
    }

    /// Per-frame features in frame order. Block energies are computed in
    /// parallel; the reduction is sequential so results do not depend on
    /// scheduling.
    pub fn frame_series(
        &self,
        seq: &VideoSequence,
    ) -> Result<Vec<FrameComplexity>, ComplexityError> {
        if seq.is_empty() {
            return Err(ComplexityError::EmptySequence);
        }
        let (w, h) = (seq.width(), seq.height());
        let energies: Vec<Vec<f64>> = seq
            .frames()
            .par_iter()
            .map(|f| self.block_energies(w, h, &to_real(f)))
            .collect::<Result<_, _>>()?;
        let norm = (energies[0].len() * self.block_size * self.block_size) as f64;

        Ok(seq
            .frames()
            .iter()
            .enumerate()
            .map(|(t, frame)| {
                let cur = &energies[t];
                let temporal_gradient = if t == 0 {
                    0.0
                } else {
                    cur.iter()
                        .zip(&energies[t - 1])
                        .map(|(a, b)| (a - b).abs())
                        .sum::<f64>()
                        / norm
                };
                let sum: u64 = frame.samples().iter().map(|&s| s as u64).sum();
                FrameComplexity {
                    texture_energy: cur.iter().sum::<f64>() / norm,
                    temporal_gradient,
                    brightness: sum as f64 / frame.samples().len() as f64,
                }
            })
            .collect())
    }

    pub fn segment_features(
        &self,
        seq: &VideoSequence,
    ) -> Result<SegmentFeatures, ComplexityError> {
        Ok(reduce_series(&self.frame_series(seq)?))
    }
}

/// Segment means of a per-frame series. The first frame's gradient is
/// excluded from the `h` denominator.
pub fn reduce_series(series: &[FrameComplexity]) -> SegmentFeatures {
    let n = series.len() as f64;
    let e_y = series.iter().map(|f| f.texture_energy).sum::<f64>() / n;
    let l_y = series.iter().map(|f| f.brightness).sum::<f64>() / n;
    let h = if series.len() > 1 {
        series[1..].iter().map(|f| f.temporal_gradient).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    SegmentFeatures { e_y, h, l_y }
}

fn to_real(frame: &LumaFrame) -> Vec<f64> {
    frame.samples().iter().map(|&s| s as f64).collect()
}

/// Segment features with the default block size.
pub fn segment_features(seq: &VideoSequence) -> Result<SegmentFeatures, ComplexityError> {
    ComplexityAnalyzer::default().segment_features(seq)
}
