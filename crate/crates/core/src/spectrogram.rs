//! Clamped dB-magnitude time-frequency images.

use std::fmt;

/// An F x T matrix of dB values, rows ascending in frequency (row 0 is DC).
///
/// `values` is row-major: cell `(f, t)` lives at `f * frames + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub values: Vec<f64>,
    pub bins: usize,
    pub frames: usize,
    pub sample_rate: u32,
    pub window_len: u32,
    pub hop: u32,
    /// Lowest representable value (peak minus dynamic range at creation).
    pub dyn_floor: f64,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrogramViolation {
    EmptyShape,
    ShapeMismatch { expected: usize, actual: usize },
    BadGeometry,
    NonFinite { row: usize, col: usize },
    BelowFloor { row: usize, col: usize },
}

impl fmt::Display for SpectrogramViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EmptyShape => f.write_str("spectrogram has no rows or no columns"),
            Self::ShapeMismatch { expected, actual } => {
                write!(f, "expected {expected} values, found {actual}")
            }
            Self::BadGeometry => f.write_str("hop must be >= 1 and <= window length"),
            Self::NonFinite { row, col } => write!(f, "non-finite value at ({row}, {col})"),
            Self::BelowFloor { row, col } => write!(f, "value below floor at ({row}, {col})"),
        }
    }
}

impl std::error::Error for SpectrogramViolation {}

impl Spectrogram {
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.frames + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        self.values[row * self.frames + col] = v;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.frames..(row + 1) * self.frames]
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// A copy with the same metadata and new values.
    pub fn with_values(&self, values: Vec<f64>) -> Spectrogram {
        debug_assert_eq!(values.len(), self.values.len());
        Spectrogram {
            values,
            ..self.clone_meta()
        }
    }

    fn clone_meta(&self) -> Spectrogram {
        Spectrogram {
            values: Vec::new(),
            bins: self.bins,
            frames: self.frames,
            sample_rate: self.sample_rate,
            window_len: self.window_len,
            hop: self.hop,
            dyn_floor: self.dyn_floor,
            label: self.label.clone(),
        }
    }

    pub fn same_shape(&self, other: &Spectrogram) -> bool {
        self.bins == other.bins && self.frames == other.frames
    }

    pub fn validate(&self) -> Result<(), SpectrogramViolation> {
        if self.bins == 0 || self.frames == 0 {
            return Err(SpectrogramViolation::EmptyShape);
        }
        let expected = self.bins * self.frames;
        if self.values.len() != expected {
            return Err(SpectrogramViolation::ShapeMismatch {
                expected,
                actual: self.values.len(),
            });
        }
        if self.hop == 0 || self.window_len < self.hop || !self.dyn_floor.is_finite() {
            return Err(SpectrogramViolation::BadGeometry);
        }
        for (i, &v) in self.values.iter().enumerate() {
            let (row, col) = (i / self.frames, i % self.frames);
            if !v.is_finite() {
                return Err(SpectrogramViolation::NonFinite { row, col });
            }
            if v < self.dyn_floor {
                return Err(SpectrogramViolation::BelowFloor { row, col });
            }
        }
        Ok(())
    }
}
