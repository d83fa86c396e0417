use super::AugError;
use crate::clip::AudioClip;
use crate::rng::RngStream;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseColor {
    White,
    Pink,
}

pub fn white_noise(len: usize, rng: &mut RngStream) -> Vec<f64> {
    (0..len).map(|_| rng.normal()).collect()
}

/// 1/f noise: white Gaussian noise shaped in the frequency domain by
/// `1/sqrt(k)` per bin (about -3 dB per octave), DC removed.
pub fn pink_noise(len: usize, rng: &mut RngStream) -> Vec<f64> {
    let white = white_noise(len, rng);
    if len < 2 {
        return vec![0.0; len];
    }
    let mut planner = FftPlanner::<f64>::new();
    let mut buf: Vec<Complex64> = white.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    planner.plan_fft_forward(len).process(&mut buf);
    buf[0] = Complex64::new(0.0, 0.0);
    for (k, c) in buf.iter_mut().enumerate().skip(1) {
        // Mirror index keeps the spectrum Hermitian.
        let f = k.min(len - k) as f64;
        *c /= f.sqrt();
    }
    planner.plan_fft_inverse(len).process(&mut buf);
    buf.iter().map(|c| c.re / len as f64).collect()
}

/// Adds noise scaled after generation so the realized SNR over the whole
/// clip is exactly `snr_db`. Each channel gets its own noise sequence.
pub fn add_noise(clip: &AudioClip, snr_db: f64, color: NoiseColor, rng: &mut RngStream) -> Result<AudioClip, AugError> {
    if !snr_db.is_finite() {
        return Err(AugError::Precondition("SNR must be finite".into()));
    }
    let signal_power = clip.power();
    if !(signal_power > 0.0) {
        return Err(AugError::ZeroPower);
    }
    let noise: Vec<Vec<f64>> = clip
        .channels
        .iter()
        .map(|c| match color {
            NoiseColor::White => white_noise(c.len(), rng),
            NoiseColor::Pink => pink_noise(c.len(), rng),
        })
        .collect();
    let noise_clip = clip.with_channels(noise);
    let noise_power = noise_clip.power();
    if !(noise_power > 0.0) {
        return Err(AugError::Precondition("generated noise has zero power".into()));
    }
    let target = signal_power / 10f64.powf(snr_db / 10.0);
    let scale = (target / noise_power).sqrt();
    let channels = clip
        .channels
        .iter()
        .zip(&noise_clip.channels)
        .map(|(x, n)| x.iter().zip(n).map(|(a, b)| a + b * scale).collect())
        .collect();
    Ok(clip.with_channels(channels))
}
