//! Raw-audio augmenters.
//!
//! Each operation is deterministic given its parameters; [`randomized`] draws
//! parameters from an [`AugmenterConfig`](crate::AugmenterConfig) and a
//! stream. All operations process channels independently and preserve the
//! sample rate and label.

mod compressor;
mod noise;
mod randomized;

pub use compressor::{dynamic_range_compress, CompressorParams};
pub use noise::{add_noise, pink_noise, white_noise, NoiseColor};
pub use randomized::{randomized, AudioOutcome};

use crate::clip::AudioClip;
use crate::dsp::{self, butterworth_biquad, filter_apply, DspError, FilterKind};
use std::f64::consts::{FRAC_PI_2, TAU};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AugError {
    #[error(transparent)]
    Dsp(#[from] DspError),
    #[error("{0}")]
    Precondition(String),
    #[error("signal has zero power")]
    ZeroPower,
    #[error("label mismatch: {0:?} vs {1:?}")]
    LabelMismatch(Option<String>, Option<String>),
    #[error("sample rate mismatch: {0} Hz vs {1} Hz")]
    RateMismatch(u32, u32),
    #[error("{0} needs a same-class partner")]
    MissingPartner(&'static str),
}

fn precondition(msg: impl Into<String>) -> AugError {
    AugError::Precondition(msg.into())
}

/// Multiplies every sample by `10^(gain_db / 20)`. No clamping.
pub fn apply_gain(clip: &AudioClip, gain_db: f64) -> Result<AudioClip, AugError> {
    if !gain_db.is_finite() {
        return Err(precondition("gain must be finite"));
    }
    if gain_db == 0.0 {
        return Ok(clip.clone());
    }
    let g = 10f64.powf(gain_db / 20.0);
    Ok(clip.map_channels(|c| c.iter().map(|v| v * g).collect()))
}

/// Delays by `round(fraction * M)` samples, rotating when `circular`.
pub fn time_shift(clip: &AudioClip, fraction: f64, circular: bool) -> Result<AudioClip, AugError> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(precondition(format!("time shift fraction {fraction} outside [0, 1)")));
    }
    let m = clip.len();
    let k = (fraction * m as f64).round() as usize;
    Ok(clip.map_channels(|c| shift_samples(c, k, circular)))
}

fn shift_samples(c: &[f64], k: usize, circular: bool) -> Vec<f64> {
    let m = c.len();
    if m == 0 {
        return Vec::new();
    }
    if circular {
        let mut out = c.to_vec();
        out.rotate_right(k % m);
        out
    } else {
        let k = k.min(m);
        let mut out = vec![0.0; k];
        out.extend_from_slice(&c[..m - k]);
        out
    }
}

/// Duration change by factor `s` with pitch preserved.
pub fn time_stretch(clip: &AudioClip, s: f64) -> Result<AudioClip, AugError> {
    Ok(dsp::phase_vocoder_stretch(clip, s)?)
}

/// Pitch change by `semitones`: stretch by `2^(st/12)`, then resample back.
pub fn pitch_shift(clip: &AudioClip, semitones: f64) -> Result<AudioClip, AugError> {
    if !(semitones.abs() <= 24.0) {
        return Err(precondition(format!("pitch shift of {semitones} semitones outside [-24, 24]")));
    }
    if semitones == 0.0 {
        return Ok(clip.clone());
    }
    let alpha = 2f64.powf(semitones / 12.0);
    let stretched = dsp::phase_vocoder_stretch(clip, alpha)?;
    Ok(dsp::resample(&stretched, 1.0 / alpha)?)
}

/// Linear-interpolated quantile of sorted data, `q` in `[0, 1]`.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Hard clipping at the `(1 - fraction)` quantile of `|x|`, then rescaling so
/// the output peak equals the input peak.
pub fn clip_distort(clip: &AudioClip, fraction: f64) -> Result<AudioClip, AugError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(precondition(format!("clip fraction {fraction} outside (0, 1]")));
    }
    let mut mags: Vec<f64> = clip.channels.iter().flatten().map(|v| v.abs()).collect();
    mags.sort_by(f64::total_cmp);
    let peak = mags.last().copied().unwrap_or(0.0);
    if peak == 0.0 {
        return Err(AugError::ZeroPower);
    }
    let theta = quantile_sorted(&mags, 1.0 - fraction);
    if theta == 0.0 {
        return Err(precondition("clip threshold is zero; reduce the clip fraction"));
    }
    let scale = peak / theta;
    Ok(clip.map_channels(|c| c.iter().map(|v| v.clamp(-theta, theta) * scale).collect()))
}

/// Applies the sine shaper `y <- sin(pi/2 * y)` `n` times. Clips peaking
/// above 1 are normalized to peak 1 first and restored after.
pub fn harmonic_distort(clip: &AudioClip, n: u32) -> AudioClip {
    if n == 0 {
        return clip.clone();
    }
    let peak = clip.peak();
    let norm = if peak > 1.0 { peak } else { 1.0 };
    clip.map_channels(|c| {
        c.iter()
            .map(|&v| {
                let mut y = v / norm;
                for _ in 0..n {
                    y = (FRAC_PI_2 * y).sin();
                }
                y * norm
            })
            .collect()
    })
}

pub fn lowpass(clip: &AudioClip, cutoff_hz: f64) -> Result<AudioClip, AugError> {
    let q = butterworth_biquad(FilterKind::Lowpass, cutoff_hz, clip.sample_rate as f64)?;
    Ok(filter_apply(clip, &q))
}

pub fn highpass(clip: &AudioClip, cutoff_hz: f64) -> Result<AudioClip, AugError> {
    let q = butterworth_biquad(FilterKind::Highpass, cutoff_hz, clip.sample_rate as f64)?;
    Ok(filter_apply(clip, &q))
}

/// Read positions `tau[n] = sum_{k<n} (1 + depth sin(2 pi rate k / fs))`,
/// stopping at the first position past the last input sample.
pub fn wow_positions(len: usize, sample_rate: u32, depth: f64, rate_hz: f64) -> Vec<f64> {
    let last = len.saturating_sub(1) as f64;
    let w = TAU * rate_hz / sample_rate as f64;
    let mut tau = 0.0;
    let mut out = Vec::with_capacity(len);
    let mut k = 0u64;
    while tau <= last {
        out.push(tau);
        tau += 1.0 + depth * (w * k as f64).sin();
        k += 1;
    }
    out
}

/// Slow periodic speed fluctuation by time-varying cubic resampling.
pub fn wow_resample(clip: &AudioClip, depth: f64, rate_hz: f64) -> Result<AudioClip, AugError> {
    if !(0.0..=0.5).contains(&depth) {
        return Err(precondition(format!("wow depth {depth} outside [0, 0.5]")));
    }
    if !(rate_hz > 0.0 && rate_hz.is_finite()) {
        return Err(precondition("wow rate must be positive"));
    }
    if clip.is_empty() {
        return Err(AugError::Dsp(DspError::Empty));
    }
    let tau = wow_positions(clip.len(), clip.sample_rate, depth, rate_hz);
    Ok(clip.map_channels(|c| tau.iter().map(|&p| dsp::hermite_at(c, p)).collect()))
}

/// `weight * a + (1 - weight) * b`, zero-padding the shorter clip.
/// Both clips must carry the same (present) label and sample rate.
pub fn mix_same_class(a: &AudioClip, b: &AudioClip, weight: f64) -> Result<AudioClip, AugError> {
    if a.label.is_none() || a.label != b.label {
        return Err(AugError::LabelMismatch(a.label.clone(), b.label.clone()));
    }
    if a.sample_rate != b.sample_rate {
        return Err(AugError::RateMismatch(a.sample_rate, b.sample_rate));
    }
    if !(0.0..=1.0).contains(&weight) {
        return Err(precondition(format!("mix weight {weight} outside [0, 1]")));
    }
    let len = a.len().max(b.len());
    let channels = a.num_channels().max(b.num_channels());
    let sample = |clip: &AudioClip, c: usize, m: usize| {
        // A mono partner is broadcast across the other clip's channels.
        let ch = &clip.channels[c.min(clip.num_channels() - 1)];
        ch.get(m).copied().unwrap_or(0.0)
    };
    let out = (0..channels)
        .map(|c| {
            (0..len)
                .map(|m| weight * sample(a, c, m) + (1.0 - weight) * sample(b, c, m))
                .collect()
        })
        .collect();
    Ok(a.with_channels(out))
}
