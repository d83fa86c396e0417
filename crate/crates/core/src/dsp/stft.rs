use super::DspError;
use crate::clip::AudioClip;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::TAU;

/// Window length, hop and FFT size of a short-time transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct StftGeometry {
    pub window_len: usize,
    pub hop: usize,
    pub fft_size: usize,
}

impl Default for StftGeometry {
    fn default() -> Self {
        Self {
            window_len: 1024,
            hop: 256,
            fft_size: 1024,
        }
    }
}

impl StftGeometry {
    pub fn new(window_len: usize, hop: usize, fft_size: usize) -> Result<Self, DspError> {
        let g = Self {
            window_len,
            hop,
            fft_size,
        };
        g.check()?;
        Ok(g)
    }

    pub fn check(&self) -> Result<(), DspError> {
        if self.window_len < 2 {
            return Err(DspError::Geometry("window length must be at least 2"));
        }
        if self.hop == 0 || self.hop > self.window_len {
            return Err(DspError::Geometry("hop must be in [1, window length]"));
        }
        if self.fft_size < self.window_len {
            return Err(DspError::Geometry("fft size must be >= window length"));
        }
        Ok(())
    }

    pub fn num_bins(&self) -> usize {
        self.fft_size / 2 + 1
    }

    /// Zeros prepended before the first frame so every real sample is
    /// covered by the full set of overlapping windows.
    pub fn head_pad(&self) -> usize {
        self.window_len - self.hop
    }

    /// Frames needed to cover `len` samples plus head and tail padding.
    pub fn num_frames(&self, len: usize) -> usize {
        let padded = len + 2 * self.head_pad();
        if padded <= self.window_len {
            1
        } else {
            (padded - self.window_len).div_ceil(self.hop) + 1
        }
    }
}

/// One-sided short-time spectrum: `frames[t][k]`, `k` in `0..=fft_size/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct StftFrames {
    pub frames: Vec<Vec<Complex64>>,
    pub geometry: StftGeometry,
    pub sample_rate: u32,
    /// Length of the signal the frames describe, excluding padding.
    pub signal_len: usize,
}

impl StftFrames {
    pub fn num_frames(&self) -> usize {
        self.frames.len()
    }

    pub fn num_bins(&self) -> usize {
        self.geometry.num_bins()
    }
}

/// Periodic Hann window, `w[n] = 0.5 - 0.5 cos(2 pi n / len)`.
pub fn hann_periodic(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| 0.5 - 0.5 * (TAU * n as f64 / len as f64).cos())
        .collect()
}

/// STFT of a raw sample slice.
///
/// The signal is preceded by `window_len - hop` zeros and zero-padded at the
/// tail; frame `t` starts at padded position `t * hop`.
pub fn stft_samples(samples: &[f64], geometry: StftGeometry, sample_rate: u32) -> Result<StftFrames, DspError> {
    geometry.check()?;
    let StftGeometry {
        window_len,
        hop,
        fft_size,
    } = geometry;
    let window = hann_periodic(window_len);
    let pad = geometry.head_pad();
    let n_frames = geometry.num_frames(samples.len());
    let fft = FftPlanner::<f64>::new().plan_fft_forward(fft_size);
    let mut buf = vec![Complex64::new(0.0, 0.0); fft_size];
    let mut frames = Vec::with_capacity(n_frames);
    for t in 0..n_frames {
        buf.fill(Complex64::new(0.0, 0.0));
        let start = (t * hop) as isize - pad as isize;
        for (i, w) in window.iter().enumerate() {
            let idx = start + i as isize;
            if idx >= 0 && (idx as usize) < samples.len() {
                buf[i] = Complex64::new(samples[idx as usize] * w, 0.0);
            }
        }
        fft.process(&mut buf);
        frames.push(buf[..geometry.num_bins()].to_vec());
    }
    Ok(StftFrames {
        frames,
        geometry,
        sample_rate,
        signal_len: samples.len(),
    })
}

/// STFT of a mono clip.
pub fn stft(clip: &AudioClip, geometry: StftGeometry) -> Result<StftFrames, DspError> {
    if clip.num_channels() != 1 {
        return Err(DspError::NotMono(clip.num_channels()));
    }
    stft_samples(&clip.channels[0], geometry, clip.sample_rate)
}

/// Weighted overlap-add inverse, normalized per sample by the summed squared
/// window. Returns `signal_len` samples.
pub fn istft(frames: &StftFrames) -> AudioClip {
    let StftGeometry {
        window_len,
        hop,
        fft_size,
    } = frames.geometry;
    let window = hann_periodic(window_len);
    let pad = frames.geometry.head_pad();
    let total = (frames.num_frames().saturating_sub(1)) * hop + window_len;
    let mut acc = vec![0.0; total];
    let mut norm = vec![0.0; total];
    let ifft = FftPlanner::<f64>::new().plan_fft_inverse(fft_size);
    let mut buf = vec![Complex64::new(0.0, 0.0); fft_size];
    let half = fft_size / 2;
    let scale = 1.0 / fft_size as f64;
    for (t, spectrum) in frames.frames.iter().enumerate() {
        buf[..=half].copy_from_slice(&spectrum[..=half]);
        for k in 1..fft_size - half {
            buf[fft_size - k] = spectrum[k].conj();
        }
        // A real signal has purely real DC and Nyquist bins.
        buf[0].im = 0.0;
        if fft_size % 2 == 0 {
            buf[half].im = 0.0;
        }
        ifft.process(&mut buf);
        let start = t * hop;
        for (i, w) in window.iter().enumerate() {
            acc[start + i] += buf[i].re * scale * w;
            norm[start + i] += w * w;
        }
    }
    let out = (0..frames.signal_len)
        .map(|n| {
            let p = n + pad;
            if p < total && norm[p] > 1e-12 {
                acc[p] / norm[p]
            } else {
                0.0
            }
        })
        .collect();
    AudioClip::mono(out, frames.sample_rate)
}
