use super::DspError;
use crate::clip::AudioClip;
use std::f64::consts::{FRAC_1_SQRT_2, TAU};

/// Second-order IIR section with `a0` normalized to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    Lowpass,
    Highpass,
}

impl Biquad {
    pub const IDENTITY: Biquad = Biquad {
        b0: 1.0,
        b1: 0.0,
        b2: 0.0,
        a1: 0.0,
        a2: 0.0,
    };

    /// Both poles strictly inside the unit circle (stability triangle).
    pub fn is_stable(&self) -> bool {
        self.a2.abs() < 1.0 && self.a1.abs() < 1.0 + self.a2
    }

    /// `|H(e^{jw})|` at `freq_hz`.
    pub fn magnitude(&self, freq_hz: f64, sample_rate: f64) -> f64 {
        let w = TAU * freq_hz / sample_rate;
        let (c1, s1, c2, s2) = (w.cos(), w.sin(), (2.0 * w).cos(), (2.0 * w).sin());
        let num_re = self.b0 + self.b1 * c1 + self.b2 * c2;
        let num_im = -(self.b1 * s1 + self.b2 * s2);
        let den_re = 1.0 + self.a1 * c1 + self.a2 * c2;
        let den_im = -(self.a1 * s1 + self.a2 * s2);
        (num_re.hypot(num_im)) / (den_re.hypot(den_im))
    }

    pub fn dc_gain(&self) -> f64 {
        (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2)
    }
}

/// Butterworth (Q = 1/sqrt 2) low- or high-pass section from the audio EQ
/// cookbook formulas.
pub fn butterworth_biquad(kind: FilterKind, cutoff_hz: f64, sample_rate: f64) -> Result<Biquad, DspError> {
    let nyquist = sample_rate / 2.0;
    if !(cutoff_hz > 0.0 && cutoff_hz < nyquist) {
        return Err(DspError::CutoffOutOfRange { cutoff_hz, nyquist });
    }
    let w0 = TAU * cutoff_hz / sample_rate;
    let (sin, cos) = w0.sin_cos();
    let alpha = sin / (2.0 * FRAC_1_SQRT_2);
    let a0 = 1.0 + alpha;
    let (b0, b1, b2) = match kind {
        FilterKind::Lowpass => ((1.0 - cos) / 2.0, 1.0 - cos, (1.0 - cos) / 2.0),
        FilterKind::Highpass => ((1.0 + cos) / 2.0, -(1.0 + cos), (1.0 + cos) / 2.0),
    };
    Ok(Biquad {
        b0: b0 / a0,
        b1: b1 / a0,
        b2: b2 / a0,
        a1: -2.0 * cos / a0,
        a2: (1.0 - alpha) / a0,
    })
}

/// Transposed direct form II, zero initial state.
pub fn filter_samples(x: &[f64], q: &Biquad) -> Vec<f64> {
    let (mut s1, mut s2) = (0.0, 0.0);
    x.iter()
        .map(|&v| {
            let y = q.b0 * v + s1;
            s1 = q.b1 * v - q.a1 * y + s2;
            s2 = q.b2 * v - q.a2 * y;
            y
        })
        .collect()
}

pub fn filter_apply(clip: &AudioClip, q: &Biquad) -> AudioClip {
    clip.map_channels(|c| filter_samples(c, q))
}
