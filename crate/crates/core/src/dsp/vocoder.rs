//! Phase-vocoder time-scale modification.
//!
//! Magnitudes are interpolated between neighbouring analysis frames and each
//! bin's phase is advanced by the measured (wrapped) phase difference between
//! those frames, as in the classic pvoc/pvsample scheme. No phase locking.

use super::stft::{istft, stft_samples, StftFrames, StftGeometry};
use super::DspError;
use crate::clip::AudioClip;
use rustfft::num_complex::Complex64;
use std::f64::consts::{PI, TAU};

pub const VOCODER_GEOMETRY: StftGeometry = StftGeometry {
    window_len: 1024,
    hop: 256,
    fft_size: 1024,
};

fn wrap_phase(p: f64) -> f64 {
    p - TAU * ((p + PI) / TAU).floor()
}

/// Stretches one channel to `round(s * len)` samples.
pub fn stretch_samples(samples: &[f64], s: f64, geometry: StftGeometry) -> Result<Vec<f64>, DspError> {
    if !(0.25..=4.0).contains(&s) {
        return Err(DspError::StretchOutOfRange(s));
    }
    if samples.is_empty() {
        return Err(DspError::Empty);
    }
    let analysis = stft_samples(samples, geometry, 1)?;
    let last = analysis.num_frames() - 1;
    let bins = geometry.num_bins();
    let out_len = ((samples.len() as f64 * s).round() as usize).max(1);
    let out_frames = geometry.num_frames(out_len);
    let expected: Vec<f64> = (0..bins)
        .map(|k| TAU * k as f64 * geometry.hop as f64 / geometry.fft_size as f64)
        .collect();
    let mut phase: Vec<f64> = analysis.frames[0].iter().map(|c| c.arg()).collect();
    let mut frames = Vec::with_capacity(out_frames);
    for n in 0..out_frames {
        let t = n as f64 / s;
        let i = t.floor() as usize;
        let frac = t - i as f64;
        let a = &analysis.frames[i.min(last)];
        let b = &analysis.frames[(i + 1).min(last)];
        let mut frame = Vec::with_capacity(bins);
        for k in 0..bins {
            let mag = (1.0 - frac) * a[k].norm() + frac * b[k].norm();
            frame.push(Complex64::from_polar(mag, phase[k]));
            let dp = wrap_phase(b[k].arg() - a[k].arg() - expected[k]);
            phase[k] += expected[k] + dp;
        }
        frames.push(frame);
    }
    let synth = StftFrames {
        frames,
        geometry,
        sample_rate: 1,
        signal_len: out_len,
    };
    Ok(istft(&synth).channels.swap_remove(0))
}

/// Changes duration by factor `s` (0.25..=4) without changing pitch.
/// Channels are processed independently.
pub fn phase_vocoder_stretch(clip: &AudioClip, s: f64) -> Result<AudioClip, DspError> {
    clip.try_map_channels(|c| stretch_samples(c, s, VOCODER_GEOMETRY))
}
