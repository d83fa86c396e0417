//! Spectrogram persistence: 8-bit grayscale PNG and the lossless "AGMS" raw
//! format.
//!
//! AGMS layout (little-endian): magic `AGMS`, version `u8 = 1`, bins `u32`,
//! frames `u32`, sample rate `u32`, window length `u32`, hop `u32`,
//! floor `f64`, then `bins * frames` `f64` values, frequency-major.

use crate::spectrogram::{Spectrogram, SpectrogramViolation};
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const RAW_MAGIC: &[u8; 4] = b"AGMS";
pub const RAW_VERSION: u8 = 1;
const RAW_HEADER_LEN: usize = 4 + 1 + 4 * 5 + 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Png,
    Raw,
}

impl ImageFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ImageFormat::Png => "png",
            ImageFormat::Raw => "agms",
        }
    }
}

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("png encoding failed: {0}")]
    Png(String),
    #[error("invalid spectrogram: {0}")]
    Invalid(#[from] SpectrogramViolation),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RawError {
    #[error("bad magic (expected AGMS)")]
    BadMagic,
    #[error("unsupported AGMS version {0}")]
    BadVersion(u8),
    #[error("truncated header: {0} bytes")]
    TruncatedHeader(usize),
    #[error("expected {expected} bytes of values, found {actual}")]
    BadLength { expected: u128, actual: usize },
    #[error("invalid spectrogram: {0}")]
    Invalid(#[from] SpectrogramViolation),
}

/// An 8-bit grayscale raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn filled(width: u32, height: u32, value: u8) -> Self {
        Self {
            width,
            height,
            pixels: vec![value; width as usize * height as usize],
        }
    }

    pub fn encode_png(&self) -> Result<Vec<u8>, ExportError> {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, self.width, self.height);
            enc.set_color(png::ColorType::Grayscale);
            enc.set_depth(png::BitDepth::Eight);
            let mut w = enc.write_header().map_err(|e| ExportError::Png(e.to_string()))?;
            w.write_image_data(&self.pixels)
                .map_err(|e| ExportError::Png(e.to_string()))?;
        }
        Ok(out)
    }
}

/// Pixel mapping `round(255 (v - floor) / (peak - floor))`, highest frequency
/// in the top image row. A flat spectrogram maps to all zeros.
pub fn spectrogram_image(spec: &Spectrogram) -> GrayImage {
    let floor = spec.dyn_floor;
    let span = spec.peak() - floor;
    let mut pixels = Vec::with_capacity(spec.values.len());
    for r in (0..spec.bins).rev() {
        for &v in spec.row(r) {
            let p = if span > 0.0 {
                (255.0 * (v - floor) / span).round().clamp(0.0, 255.0) as u8
            } else {
                0
            };
            pixels.push(p);
        }
    }
    GrayImage {
        width: spec.frames as u32,
        height: spec.bins as u32,
        pixels,
    }
}

pub fn encode_raw(spec: &Spectrogram) -> Vec<u8> {
    let mut out = Vec::with_capacity(RAW_HEADER_LEN + 8 * spec.values.len());
    out.extend_from_slice(RAW_MAGIC);
    out.push(RAW_VERSION);
    for v in [
        spec.bins as u32,
        spec.frames as u32,
        spec.sample_rate,
        spec.window_len,
        spec.hop,
    ] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&spec.dyn_floor.to_le_bytes());
    for v in &spec.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Parses AGMS bytes and validates the result. The label is not stored.
pub fn decode_raw(bytes: &[u8]) -> Result<Spectrogram, RawError> {
    if bytes.len() < 4 || &bytes[..4] != RAW_MAGIC {
        return Err(RawError::BadMagic);
    }
    if bytes.len() < 5 {
        return Err(RawError::TruncatedHeader(bytes.len()));
    }
    if bytes[4] != RAW_VERSION {
        return Err(RawError::BadVersion(bytes[4]));
    }
    if bytes.len() < RAW_HEADER_LEN {
        return Err(RawError::TruncatedHeader(bytes.len()));
    }
    let u32_at = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
    let bins = u32_at(5);
    let frames = u32_at(9);
    let sample_rate = u32_at(13);
    let window_len = u32_at(17);
    let hop = u32_at(21);
    let dyn_floor = f64::from_le_bytes(bytes[25..33].try_into().unwrap());
    let expected = bins as u128 * frames as u128 * 8;
    let body = &bytes[RAW_HEADER_LEN..];
    if body.len() as u128 != expected {
        return Err(RawError::BadLength {
            expected,
            actual: body.len(),
        });
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let spec = Spectrogram {
        values,
        bins: bins as usize,
        frames: frames as usize,
        sample_rate,
        window_len,
        hop,
        dyn_floor,
        label: None,
    };
    spec.validate()?;
    Ok(spec)
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), ExportError> {
    std::fs::write(path, bytes).map_err(|source| ExportError::Write {
        path: path.to_owned(),
        source,
    })
}

/// Serializes `spec` in `format`.
pub fn encode_spectrogram(spec: &Spectrogram, format: ImageFormat) -> Result<Vec<u8>, ExportError> {
    spec.validate()?;
    match format {
        ImageFormat::Png => spectrogram_image(spec).encode_png(),
        ImageFormat::Raw => Ok(encode_raw(spec)),
    }
}

pub fn export_spectrogram(spec: &Spectrogram, path: impl AsRef<Path>, format: ImageFormat) -> Result<(), ExportError> {
    write_bytes(path.as_ref(), &encode_spectrogram(spec, format)?)
}

pub fn write_png(image: &GrayImage, path: impl AsRef<Path>) -> Result<(), ExportError> {
    write_bytes(path.as_ref(), &image.encode_png()?)
}

/// Tiles images row-major into `columns` columns separated by white
/// gutters. Each cell is sized to the largest tile; tiles sit top-left and
/// unused cell area is white.
pub fn contact_sheet(tiles: &[GrayImage], columns: usize, gutter: u32) -> GrayImage {
    if tiles.is_empty() || columns == 0 {
        return GrayImage::filled(0, 0, 255);
    }
    let cell_w = tiles.iter().map(|t| t.width).max().unwrap_or(0);
    let cell_h = tiles.iter().map(|t| t.height).max().unwrap_or(0);
    let cols = columns.min(tiles.len()) as u32;
    let rows = tiles.len().div_ceil(columns) as u32;
    let width = cols * cell_w + (cols + 1) * gutter;
    let height = rows * cell_h + (rows + 1) * gutter;
    let mut sheet = GrayImage::filled(width, height, 255);
    for (i, tile) in tiles.iter().enumerate() {
        let (cx, cy) = ((i % columns) as u32, (i / columns) as u32);
        let x0 = gutter + cx * (cell_w + gutter);
        let y0 = gutter + cy * (cell_h + gutter);
        for y in 0..tile.height {
            let src = (y * tile.width) as usize;
            let dst = ((y0 + y) * width + x0) as usize;
            sheet.pixels[dst..dst + tile.width as usize]
                .copy_from_slice(&tile.pixels[src..src + tile.width as usize]);
        }
    }
    sheet
}

pub fn read_raw(path: impl AsRef<Path>) -> Result<Result<Spectrogram, RawError>, ExportError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| ExportError::Read {
        path: path.to_owned(),
        source,
    })?;
    Ok(decode_raw(&bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(values: Vec<f64>, bins: usize, frames: usize, floor: f64) -> Spectrogram {
        Spectrogram {
            values,
            bins,
            frames,
            sample_rate: 44100,
            window_len: 1024,
            hop: 256,
            dyn_floor: floor,
            label: None,
        }
    }

    #[test]
    fn pixel_endpoints_and_orientation() {
        // row 0 (DC) holds the floor, row 1 the peak
        let s = spec(vec![-60.0, -60.0, 0.0, 0.0], 2, 2, -60.0);
        let img = spectrogram_image(&s);
        assert_eq!((img.width, img.height), (2, 2));
        assert_eq!(img.pixels, vec![255, 255, 0, 0]);
    }

    #[test]
    fn flat_maps_to_zero() {
        let s = spec(vec![-3.0; 6], 3, 2, -3.0);
        assert!(spectrogram_image(&s).pixels.iter().all(|&p| p == 0));
    }

    #[test]
    fn raw_round_trip_is_bit_exact() {
        let values: Vec<f64> = (0..12).map(|i| -60.0 + (i as f64).sqrt() * 7.1).collect();
        let s = spec(values, 3, 4, -60.0);
        let back = decode_raw(&encode_raw(&s)).unwrap();
        assert_eq!(back, s);
        assert_eq!(encode_raw(&s).len(), 33 + 96);
    }

    #[test]
    fn raw_rejects_garbage() {
        let s = spec(vec![0.0; 4], 2, 2, -60.0);
        let good = encode_raw(&s);
        let mut bad = good.clone();
        bad[0] = b'X';
        assert_eq!(decode_raw(&bad), Err(RawError::BadMagic));
        let mut bad = good.clone();
        bad[4] = 2;
        assert_eq!(decode_raw(&bad), Err(RawError::BadVersion(2)));
        assert!(matches!(decode_raw(&good[..20]), Err(RawError::TruncatedHeader(20))));
        assert!(matches!(decode_raw(&good[..good.len() - 1]), Err(RawError::BadLength { .. })));
        let below = spec(vec![-70.0, 0.0, 0.0, 0.0], 2, 2, -60.0);
        assert!(matches!(decode_raw(&encode_raw(&below)), Err(RawError::Invalid(_))));
    }

    #[test]
    fn sheet_layout() {
        let tile = GrayImage::filled(3, 2, 7);
        let sheet = contact_sheet(&vec![tile; 5], 4, 2);
        assert_eq!(sheet.width, 4 * 3 + 5 * 2);
        assert_eq!(sheet.height, 2 * 2 + 3 * 2);
        assert_eq!(sheet.pixels[0], 255);
        assert_eq!(sheet.pixels[(2 * sheet.width + 2) as usize], 7);
        // sixth cell (row 1, col 1) is empty
        let y = 2 + 2 + 2;
        let x = 2 + 3 + 2;
        assert_eq!(sheet.pixels[(y * sheet.width + x) as usize], 255);
    }

    #[test]
    fn png_is_decodable() {
        let s = spec(vec![-60.0, -30.0, 0.0, -15.0, -45.0, -60.0], 3, 2, -60.0);
        let bytes = encode_spectrogram(&s, ImageFormat::Png).unwrap();
        assert_eq!(&bytes[1..4], b"PNG");
    }
}
