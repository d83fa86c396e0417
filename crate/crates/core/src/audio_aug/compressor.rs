use super::AugError;
use crate::clip::AudioClip;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressorParams {
    pub threshold_db: f64,
    pub ratio: f64,
    pub attack_ms: f64,
    pub release_ms: f64,
    /// Rescale the output to the input RMS.
    pub makeup: bool,
}

impl Default for CompressorParams {
    fn default() -> Self {
        Self {
            threshold_db: -20.0,
            ratio: 4.0,
            attack_ms: 5.0,
            release_ms: 100.0,
            makeup: true,
        }
    }
}

impl CompressorParams {
    pub fn check(&self) -> Result<(), AugError> {
        let ok = self.ratio >= 1.0
            && self.threshold_db <= 0.0
            && self.threshold_db.is_finite()
            && self.ratio.is_finite()
            && self.attack_ms > 0.0
            && self.release_ms > 0.0;
        if ok {
            Ok(())
        } else {
            Err(AugError::Precondition(format!("invalid compressor parameters {self:?}")))
        }
    }

    /// Static gain in dB for a detector level in dB:
    /// `min(0, T + (L - T) / R - L)`, written so that `R = 1` gives exactly 0.
    pub fn gain_db(&self, level_db: f64) -> f64 {
        ((self.threshold_db - level_db) * (1.0 - 1.0 / self.ratio)).min(0.0)
    }
}

fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len().max(1) as f64).sqrt()
}

/// Feed-forward compressor with a peak envelope follower.
pub fn dynamic_range_compress(clip: &AudioClip, p: &CompressorParams) -> Result<AudioClip, AugError> {
    p.check()?;
    let fs = clip.sample_rate as f64;
    let a_att = (-1.0 / (p.attack_ms * fs / 1000.0)).exp();
    let a_rel = (-1.0 / (p.release_ms * fs / 1000.0)).exp();
    Ok(clip.map_channels(|x| {
        let mut env = 0.0f64;
        let mut y: Vec<f64> = x
            .iter()
            .map(|&v| {
                let r = v.abs();
                let a = if r > env { a_att } else { a_rel };
                env = a * env + (1.0 - a) * r;
                let level = 20.0 * (env + 1e-10).log10();
                let g = p.gain_db(level);
                if g == 0.0 {
                    v
                } else {
                    v * 10f64.powf(g / 20.0)
                }
            })
            .collect();
        if p.makeup {
            let (rin, rout) = (rms(x), rms(&y));
            if rout > 0.0 && rout != rin {
                let s = rin / rout;
                y.iter_mut().for_each(|v| *v *= s);
            }
        }
        y
    }))
}
