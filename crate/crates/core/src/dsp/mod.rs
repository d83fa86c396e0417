//! Signal kernels shared by the augmenters.

mod biquad;
mod resample;
mod sgram;
mod stft;
mod vocoder;

pub use biquad::{butterworth_biquad, filter_apply, filter_samples, Biquad, FilterKind};
pub use resample::{hermite_at, resample, resample_samples};
pub use sgram::{sgram, SgramConfig};
pub use stft::{hann_periodic, istft, stft, stft_samples, StftFrames, StftGeometry};
pub use vocoder::{phase_vocoder_stretch, stretch_samples, VOCODER_GEOMETRY};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DspError {
    #[error("expected a mono signal, found {0} channels")]
    NotMono(usize),
    #[error("invalid STFT geometry: {0}")]
    Geometry(&'static str),
    #[error("stretch factor {0} outside [0.25, 4]")]
    StretchOutOfRange(f64),
    #[error("resample ratio {0} outside [0.25, 4]")]
    RatioOutOfRange(f64),
    #[error("cutoff {cutoff_hz} Hz outside (0, {nyquist} Hz)")]
    CutoffOutOfRange { cutoff_hz: f64, nyquist: f64 },
    #[error("signal too short: {len} samples, window needs {window_len}")]
    SignalTooShort { len: usize, window_len: usize },
    #[error("empty signal")]
    Empty,
}
