use super::{Framerate, IngestError, LumaFrame, VideoSequence};

/// Consecutive `width * height` luma blocks with no headers.
pub fn parse_raw_luma(
    data: &[u8],
    width: usize,
    height: usize,
    framerate: Framerate,
) -> Result<VideoSequence, IngestError> {
    let frame_len = width * height;
    if frame_len == 0 {
        return Err(IngestError::InvalidSpec(format!(
            "raw dimensions {width}x{height} must be positive"
        )));
    }
    if data.is_empty() {
        return Err(IngestError::ZeroFrames);
    }
    let remainder = data.len() % frame_len;
    if remainder != 0 {
        return Err(IngestError::TruncatedFrame {
            frame: data.len() / frame_len,
            needed: frame_len,
            available: remainder,
        });
    }
    let frames = data
        .chunks_exact(frame_len)
        .map(|chunk| LumaFrame::new(width, height, chunk.to_vec()))
        .collect::<Result<Vec<_>, _>>()?;
    VideoSequence::new(frames, framerate)
}
