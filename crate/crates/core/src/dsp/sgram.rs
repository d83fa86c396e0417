use super::stft::{stft_samples, StftGeometry};
use super::DspError;
use crate::audio_io::to_mono;
use crate::clip::AudioClip;
use crate::spectrogram::Spectrogram;

const LOG_GUARD: f64 = 1e-10;

/// Spectrogram geometry and dynamic range.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SgramConfig {
    pub window_len: usize,
    pub hop: usize,
    pub fft_size: usize,
    pub dynrange_db: f64,
}

impl Default for SgramConfig {
    fn default() -> Self {
        Self {
            window_len: 1024,
            hop: 256,
            fft_size: 1024,
            dynrange_db: 60.0,
        }
    }
}

impl SgramConfig {
    pub fn geometry(&self) -> StftGeometry {
        StftGeometry {
            window_len: self.window_len,
            hop: self.hop,
            fft_size: self.fft_size,
        }
    }

    pub fn check(&self) -> Result<(), DspError> {
        self.geometry().check()?;
        if !(self.dynrange_db.is_finite() && self.dynrange_db > 0.0) {
            return Err(DspError::Geometry("dynamic range must be positive"));
        }
        if u32::try_from(self.window_len).is_err() {
            return Err(DspError::Geometry("window length too large"));
        }
        Ok(())
    }
}

/// dB-magnitude spectrogram clamped to `dynrange_db` below its global peak.
/// Multi-channel clips are averaged to mono first.
pub fn sgram(clip: &AudioClip, cfg: &SgramConfig) -> Result<Spectrogram, DspError> {
    cfg.check()?;
    let mono = to_mono(clip);
    let samples = mono.channels.first().map(Vec::as_slice).unwrap_or(&[]);
    if samples.len() < cfg.window_len {
        return Err(DspError::SignalTooShort {
            len: samples.len(),
            window_len: cfg.window_len,
        });
    }
    let frames = stft_samples(samples, cfg.geometry(), clip.sample_rate)?;
    let bins = frames.num_bins();
    let cols = frames.num_frames();
    let mut values = vec![0.0; bins * cols];
    for (t, frame) in frames.frames.iter().enumerate() {
        for (f, c) in frame.iter().enumerate() {
            values[f * cols + t] = 20.0 * (c.norm() + LOG_GUARD).log10();
        }
    }
    let peak = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let floor = peak - cfg.dynrange_db;
    for v in &mut values {
        *v = v.max(floor);
    }
    Ok(Spectrogram {
        values,
        bins,
        frames: cols,
        sample_rate: clip.sample_rate,
        window_len: cfg.window_len as u32,
        hop: cfg.hop as u32,
        dyn_floor: floor,
        label: clip.label.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn sine_peaks_at_bin_ten() {
        let x = (0..44100).map(|n| (TAU * 440.0 * n as f64 / 44100.0).sin()).collect();
        let s = sgram(&AudioClip::mono(x, 44100), &SgramConfig::default()).unwrap();
        assert_eq!(s.bins, 513);
        let means: Vec<f64> = (0..s.bins)
            .map(|f| s.row(f).iter().sum::<f64>() / s.frames as f64)
            .collect();
        let arg = (0..s.bins).max_by(|&a, &b| means[a].total_cmp(&means[b])).unwrap();
        assert_eq!(arg, 10);
        let range = s.peak() - s.values.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(range <= 60.0 + 1e-12);
        assert!(s.validate().is_ok());
    }

    #[test]
    fn silence_is_flat() {
        let s = sgram(&AudioClip::mono(vec![0.0; 4000], 8000), &SgramConfig::default()).unwrap();
        assert!(s.values.iter().all(|&v| v == s.values[0]));
        assert!(s.values.iter().all(|v| v.is_finite()));
        assert_eq!(s.dyn_floor, s.peak() - 60.0);
    }

    #[test]
    fn short_signal_rejected() {
        let err = sgram(&AudioClip::mono(vec![0.1; 1000], 8000), &SgramConfig::default()).unwrap_err();
        assert!(err.to_string().starts_with("signal too short"));
    }
}
