use super::biquad::{butterworth_biquad, filter_samples, FilterKind};
use super::DspError;
use crate::clip::AudioClip;

/// Catmull-Rom cubic Hermite interpolation of `x` at fractional `pos`,
/// clamping indices at both ends. Exact at integer positions.
pub fn hermite_at(x: &[f64], pos: f64) -> f64 {
    let last = x.len() as isize - 1;
    let i = pos.floor();
    let t = pos - i;
    let i = i as isize;
    let at = |k: isize| x[k.clamp(0, last) as usize];
    let (xm1, x0, x1, x2) = (at(i - 1), at(i), at(i + 1), at(i + 2));
    let c1 = 0.5 * (x1 - xm1);
    let c2 = xm1 - 2.5 * x0 + 2.0 * x1 - 0.5 * x2;
    let c3 = 0.5 * (x2 - xm1) + 1.5 * (x0 - x1);
    ((c3 * t + c2) * t + c1) * t + x0
}

/// Pitch-scaling resample of one channel to `round(len * ratio)` samples.
pub fn resample_samples(x: &[f64], ratio: f64, sample_rate: u32) -> Result<Vec<f64>, DspError> {
    if !(0.25..=4.0).contains(&ratio) {
        return Err(DspError::RatioOutOfRange(ratio));
    }
    if x.is_empty() {
        return Err(DspError::Empty);
    }
    let filtered;
    let src = if ratio < 1.0 {
        let fc = 0.45 * ratio * sample_rate as f64 / 2.0;
        let q = butterworth_biquad(FilterKind::Lowpass, fc, sample_rate as f64)?;
        filtered = filter_samples(x, &q);
        &filtered[..]
    } else {
        x
    };
    let out_len = ((x.len() as f64 * ratio).round() as usize).max(1);
    Ok((0..out_len).map(|n| hermite_at(src, n as f64 / ratio)).collect())
}

/// Resamples every channel by `ratio`; the nominal sample rate is unchanged,
/// so `ratio < 1` raises pitch and shortens the clip.
pub fn resample(clip: &AudioClip, ratio: f64) -> Result<AudioClip, DspError> {
    let rate = clip.sample_rate;
    clip.try_map_channels(|c| resample_samples(c, ratio, rate))
}
