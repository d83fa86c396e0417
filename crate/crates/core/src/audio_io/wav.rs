use crate::clip::{AudioClip, ClipViolation};
use std::path::{Path, PathBuf};
use thiserror::Error;

const FORMAT_PCM: u16 = 1;
const FORMAT_FLOAT: u16 = 3;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WavCodec {
    #[default]
    Pcm16,
    Float32,
}

/// Target layout for [`write_wav`]. Channel count and rate must match the clip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WavEncoding {
    pub codec: WavCodec,
    pub channels: u16,
    pub sample_rate: u32,
}

impl WavEncoding {
    pub fn for_clip(clip: &AudioClip, codec: WavCodec) -> Self {
        Self {
            codec,
            channels: clip.num_channels() as u16,
            sample_rate: clip.sample_rate,
        }
    }
}

#[derive(Debug, Error)]
pub enum WavError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("not a RIFF/WAVE file (offset {offset})")]
    NotRiff { offset: usize },
    #[error("truncated chunk header at offset {offset}")]
    TruncatedChunk { offset: usize },
    #[error("\"fmt \" chunk missing")]
    MissingFmt,
    #[error("\"fmt \" chunk truncated at offset {offset}")]
    TruncatedFmt { offset: usize },
    #[error("\"data\" chunk missing")]
    MissingData,
    #[error("\"data\" chunk truncated at offset {offset}: declared {declared} bytes, {available} available")]
    TruncatedData {
        offset: usize,
        declared: usize,
        available: usize,
    },
    #[error("unsupported format code {code:#06x} at offset {offset}")]
    UnsupportedFormat { code: u16, offset: usize },
    #[error("unsupported bit depth {bits} for format code {code} at offset {offset}")]
    UnsupportedBits { bits: u16, code: u16, offset: usize },
    #[error("invalid channel count {channels} at offset {offset}")]
    BadChannels { channels: u16, offset: usize },
    #[error("invalid sample rate {rate} at offset {offset}")]
    BadSampleRate { rate: u32, offset: usize },
    #[error("invalid block alignment {block_align} at offset {offset}")]
    BadBlockAlign { block_align: u16, offset: usize },
    #[error("decoded clip rejected: {0}")]
    Invalid(#[from] ClipViolation),
    #[error("encoding does not match clip: {0}")]
    EncodingMismatch(&'static str),
}

impl WavError {
    /// True for errors caused by the filesystem rather than file contents.
    pub fn is_io(&self) -> bool {
        matches!(self, WavError::Read { .. } | WavError::Write { .. })
    }
}

struct Fmt {
    code: u16,
    channels: u16,
    sample_rate: u32,
    block_align: u16,
    bits: u16,
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

fn parse_fmt(body: &[u8], offset: usize) -> Result<Fmt, WavError> {
    if body.len() < 16 {
        return Err(WavError::TruncatedFmt {
            offset: offset + body.len(),
        });
    }
    let mut code = u16_at(body, 0);
    let channels = u16_at(body, 2);
    let sample_rate = u32_at(body, 4);
    let block_align = u16_at(body, 12);
    let bits = u16_at(body, 14);
    if code == FORMAT_EXTENSIBLE {
        // cbSize(2) validBits(2) channelMask(4) then the subformat GUID,
        // whose first two bytes carry the real format code.
        if body.len() < 26 {
            return Err(WavError::TruncatedFmt {
                offset: offset + body.len(),
            });
        }
        code = u16_at(body, 24);
    }
    if channels == 0 {
        return Err(WavError::BadChannels {
            channels,
            offset: offset + 2,
        });
    }
    if sample_rate == 0 {
        return Err(WavError::BadSampleRate {
            rate: sample_rate,
            offset: offset + 4,
        });
    }
    match (code, bits) {
        (FORMAT_PCM, 8 | 16 | 24 | 32) | (FORMAT_FLOAT, 32) => {}
        (FORMAT_PCM | FORMAT_FLOAT, _) => {
            return Err(WavError::UnsupportedBits {
                bits,
                code,
                offset: offset + 14,
            })
        }
        _ => return Err(WavError::UnsupportedFormat { code, offset }),
    }
    let expected_align = channels as u32 * (bits as u32 / 8);
    if block_align as u32 != expected_align {
        return Err(WavError::BadBlockAlign {
            block_align,
            offset: offset + 12,
        });
    }
    Ok(Fmt {
        code,
        channels,
        sample_rate,
        block_align,
        bits,
    })
}

fn decode_sample(fmt: &Fmt, b: &[u8]) -> f64 {
    match (fmt.code, fmt.bits) {
        (FORMAT_PCM, 8) => (b[0] as f64 - 128.0) / 128.0,
        (FORMAT_PCM, 16) => i16::from_le_bytes([b[0], b[1]]) as f64 / 32768.0,
        (FORMAT_PCM, 24) => {
            let v = i32::from_le_bytes([0, b[0], b[1], b[2]]) >> 8;
            v as f64 / 8_388_608.0
        }
        (FORMAT_PCM, 32) => i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64 / 2_147_483_648.0,
        (FORMAT_FLOAT, 32) => f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
        _ => unreachable!("format validated in parse_fmt"),
    }
}

/// Parses a RIFF/WAVE byte buffer. Unknown chunks are skipped; a trailing
/// partial sample frame in the data chunk is ignored.
pub fn decode_wav(bytes: &[u8]) -> Result<AudioClip, WavError> {
    if bytes.len() < 12 {
        return Err(WavError::NotRiff { offset: 0 });
    }
    if &bytes[0..4] != b"RIFF" {
        return Err(WavError::NotRiff { offset: 0 });
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(WavError::NotRiff { offset: 8 });
    }
    let mut fmt: Option<Fmt> = None;
    let mut pos = 12;
    while pos < bytes.len() {
        if bytes.len() - pos < 8 {
            return Err(WavError::TruncatedChunk { offset: pos });
        }
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4) as usize;
        let body_at = pos + 8;
        let available = bytes.len() - body_at;
        match id {
            b"fmt " => {
                if size > available {
                    return Err(WavError::TruncatedFmt {
                        offset: bytes.len(),
                    });
                }
                fmt = Some(parse_fmt(&bytes[body_at..body_at + size], body_at)?);
            }
            b"data" => {
                let fmt = fmt.ok_or(WavError::MissingFmt)?;
                if size > available {
                    return Err(WavError::TruncatedData {
                        offset: body_at,
                        declared: size,
                        available,
                    });
                }
                return decode_frames(&fmt, &bytes[body_at..body_at + size]);
            }
            _ => {}
        }
        // Chunks are word aligned.
        pos = body_at.saturating_add(size).saturating_add(size & 1);
    }
    if fmt.is_none() {
        Err(WavError::MissingFmt)
    } else {
        Err(WavError::MissingData)
    }
}

fn decode_frames(fmt: &Fmt, data: &[u8]) -> Result<AudioClip, WavError> {
    let channels = fmt.channels as usize;
    let frame_bytes = fmt.block_align as usize;
    let width = frame_bytes / channels;
    let frames = data.len() / frame_bytes;
    let mut out = vec![Vec::with_capacity(frames); channels];
    for frame in data.chunks_exact(frame_bytes) {
        for (c, sample) in frame.chunks_exact(width).enumerate() {
            out[c].push(decode_sample(fmt, sample));
        }
    }
    let clip = AudioClip::new(out, fmt.sample_rate);
    clip.validate()?;
    Ok(clip)
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioClip, WavError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| WavError::Read {
        path: path.to_owned(),
        source,
    })?;
    decode_wav(&bytes)
}

/// Quantizes one sample to 16-bit PCM: clamp, scale by 2^15, round half away from zero.
pub fn quantize_pcm16(v: f64) -> i16 {
    let clamped = v.clamp(-1.0, 1.0 - 1.0 / 32768.0);
    (clamped * 32768.0).round() as i16
}

/// Serializes a clip to RIFF/WAVE bytes.
pub fn encode_wav(clip: &AudioClip, enc: WavEncoding) -> Result<Vec<u8>, WavError> {
    clip.validate()?;
    if enc.channels as usize != clip.num_channels() {
        return Err(WavError::EncodingMismatch("channel count"));
    }
    if enc.sample_rate != clip.sample_rate {
        return Err(WavError::EncodingMismatch("sample rate"));
    }
    let (code, width) = match enc.codec {
        WavCodec::Pcm16 => (FORMAT_PCM, 2u16),
        WavCodec::Float32 => (FORMAT_FLOAT, 4u16),
    };
    let block_align = enc.channels * width;
    let data_len = clip.len() * block_align as usize;
    let data_len_u32 =
        u32::try_from(data_len).map_err(|_| WavError::EncodingMismatch("clip too long for RIFF"))?;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len_u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&code.to_le_bytes());
    out.extend_from_slice(&enc.channels.to_le_bytes());
    out.extend_from_slice(&enc.sample_rate.to_le_bytes());
    out.extend_from_slice(&(enc.sample_rate * block_align as u32).to_le_bytes());
    out.extend_from_slice(&block_align.to_le_bytes());
    out.extend_from_slice(&(width * 8).to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len_u32.to_le_bytes());
    for m in 0..clip.len() {
        for ch in &clip.channels {
            match enc.codec {
                WavCodec::Pcm16 => out.extend_from_slice(&quantize_pcm16(ch[m]).to_le_bytes()),
                WavCodec::Float32 => out.extend_from_slice(&(ch[m] as f32).to_le_bytes()),
            }
        }
    }
    Ok(out)
}

pub fn write_wav(clip: &AudioClip, path: impl AsRef<Path>, enc: WavEncoding) -> Result<(), WavError> {
    let path = path.as_ref();
    let bytes = encode_wav(clip, enc)?;
    std::fs::write(path, bytes).map_err(|source| WavError::Write {
        path: path.to_owned(),
        source,
    })
}
