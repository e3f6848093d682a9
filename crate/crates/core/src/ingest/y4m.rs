use super::{Framerate, IngestError, LumaFrame, VideoSequence};

const MAGIC: &[u8] = b"YUV4MPEG2";
const FRAME_MARKER: &[u8] = b"FRAME";

/// 8-bit chroma layouts the parser understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Colorspace {
    C420,
    C422,
    C444,
    Mono,
}

impl Colorspace {
    fn from_tag(tag: &str) -> Result<Self, IngestError> {
        match tag {
            "420" | "420jpeg" | "420paldv" | "420mpeg2" => Ok(Self::C420),
            "422" => Ok(Self::C422),
            "444" => Ok(Self::C444),
            "mono" => Ok(Self::Mono),
            other => Err(IngestError::UnsupportedColorspace(other.to_owned())),
        }
    }

    /// The `C` header tag written by [`serialize_y4m`].
    pub fn tag(self) -> &'static str {
        match self {
            Self::C420 => "420jpeg",
            Self::C422 => "422",
            Self::C444 => "444",
            Self::Mono => "mono",
        }
    }

    /// Bytes of both chroma planes for one frame.
    fn chroma_len(self, width: usize, height: usize) -> usize {
        let half_w = width.div_ceil(2);
        let half_h = height.div_ceil(2);
        match self {
            Self::C420 => 2 * half_w * half_h,
            Self::C422 => 2 * half_w * height,
            Self::C444 => 2 * width * height,
            Self::Mono => 0,
        }
    }
}

impl std::str::FromStr for Colorspace {
    type Err = IngestError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_tag(s)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Ignore bytes after the last complete frame instead of failing.
    pub allow_trailing_data: bool,
}

struct Header {
    width: usize,
    height: usize,
    framerate: Framerate,
    colorspace: Colorspace,
}

fn malformed(msg: impl Into<String>) -> IngestError {
    IngestError::MalformedHeader(msg.into())
}

fn parse_header(line: &[u8]) -> Result<Header, IngestError> {
    let text = std::str::from_utf8(line).map_err(|_| malformed("header is not ASCII"))?;
    let mut tokens = text.split(' ');
    if tokens.next() != Some("YUV4MPEG2") {
        return Err(malformed("missing YUV4MPEG2 magic"));
    }

    let mut width = None;
    let mut height = None;
    let mut framerate = None;
    let mut colorspace = Colorspace::C420;

    for token in tokens {
        let mut chars = token.chars();
        let Some(key) = chars.next() else {
            return Err(malformed("empty header tag"));
        };
        let value = chars.as_str();
        match key {
            'W' => width = Some(parse_dim(value, "W")?),
            'H' => height = Some(parse_dim(value, "H")?),
            'F' => {
                let (num, den) = value
                    .split_once(':')
                    .ok_or_else(|| malformed(format!("bad F tag `{value}`")))?;
                let num: u32 = num.parse().map_err(|_| malformed("bad F numerator"))?;
                let den: u32 = den.parse().map_err(|_| malformed("bad F denominator"))?;
                framerate =
                    Some(Framerate::new(num, den).map_err(|_| malformed("F must be positive"))?);
            }
            'C' => colorspace = Colorspace::from_tag(value)?,
            // interlacing, aspect and extension tags do not affect luma
            'I' | 'A' | 'X' => {}
            other => return Err(malformed(format!("unknown tag `{other}`"))),
        }
    }

    Ok(Header {
        width: width.ok_or_else(|| malformed("missing W tag"))?,
        height: height.ok_or_else(|| malformed("missing H tag"))?,
        framerate: framerate.ok_or_else(|| malformed("missing F tag"))?,
        colorspace,
    })
}

fn parse_dim(value: &str, tag: &str) -> Result<usize, IngestError> {
    match value.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(malformed(format!("bad {tag} tag `{value}`"))),
    }
}

/// Parse a Y4M stream, rejecting trailing bytes after the last frame.
pub fn parse_y4m(data: &[u8]) -> Result<VideoSequence, IngestError> {
    parse_y4m_with(data, ParseOptions::default())
}

pub fn parse_y4m_with(data: &[u8], opts: ParseOptions) -> Result<VideoSequence, IngestError> {
    if !data.starts_with(MAGIC) {
        return Err(malformed("missing YUV4MPEG2 magic"));
    }
    let header_end = data
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| malformed("header is not LF-terminated"))?;
    let header = parse_header(&data[..header_end])?;

    let luma_len = header.width * header.height;
    let chroma_len = header.colorspace.chroma_len(header.width, header.height);

    let mut pos = header_end + 1;
    let mut frames = Vec::new();
    while pos < data.len() {
        let rest = &data[pos..];
        let is_marker = rest.starts_with(FRAME_MARKER)
            && matches!(rest.get(FRAME_MARKER.len()), Some(b'\n') | Some(b' '));
        if !is_marker {
            if opts.allow_trailing_data && !frames.is_empty() {
                break;
            }
            if frames.is_empty() {
                return Err(IngestError::MalformedFrameHeader { offset: pos });
            }
            return Err(IngestError::TrailingData(rest.len()));
        }
        let line_len = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or(IngestError::MalformedFrameHeader { offset: pos })?;
        pos += line_len + 1;

        let needed = luma_len + chroma_len;
        let available = data.len() - pos;
        if available < needed {
            return Err(IngestError::TruncatedFrame {
                frame: frames.len(),
                needed,
                available,
            });
        }
        let luma = data[pos..pos + luma_len].to_vec();
        frames.push(LumaFrame::new(header.width, header.height, luma)?);
        pos += needed;
    }

    if frames.is_empty() {
        return Err(IngestError::ZeroFrames);
    }
    VideoSequence::new(frames, header.framerate)
}

/// Write `seq` as Y4M. Chroma planes, if any, are filled with neutral 128.
pub fn serialize_y4m(seq: &VideoSequence, colorspace: Colorspace) -> Vec<u8> {
    let (w, h) = (seq.width(), seq.height());
    let fps = seq.framerate();
    let chroma_len = colorspace.chroma_len(w, h);
    let mut out = format!(
        "YUV4MPEG2 W{w} H{h} F{}:{} Ip A1:1 C{}\n",
        fps.num,
        fps.den,
        colorspace.tag()
    )
    .into_bytes();
    out.reserve(seq.len() * (6 + w * h + chroma_len));
    for frame in seq.frames() {
        out.extend_from_slice(b"FRAME\n");
        out.extend_from_slice(frame.samples());
        out.resize(out.len() + chroma_len, 128);
    }
    out
}
