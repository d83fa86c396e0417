use super::*;
use crate::registry::{AugmenterConfig, Domain, DrawnParams, Method};
use crate::rng::RngStream;

/// Result of a randomized audio augmentation with the values that produced it.
#[derive(Debug, Clone)]
pub struct AudioOutcome {
    pub clip: AudioClip,
    pub drawn: DrawnParams,
}

/// Draws parameters for `cfg` from `rng` and applies the matching operation.
///
/// `partner` is required by [`Method::Mix`] and ignored otherwise. Noise
/// realizations are drawn from `rng` after the parameters.
pub fn randomized(
    cfg: &AugmenterConfig,
    rng: &mut RngStream,
    clip: &AudioClip,
    partner: Option<&AudioClip>,
) -> Result<AudioOutcome, AugError> {
    if cfg.method.domain() != Domain::Audio {
        return Err(precondition(format!("{} is not an audio method", cfg.method)));
    }
    let p = cfg.draw(rng);
    let out = match cfg.method {
        Method::PitchShift => pitch_shift(clip, p.real("semitones"))?,
        Method::TimeStretch => time_stretch(clip, p.real("factor"))?,
        Method::TimeShift => time_shift(clip, p.real("fraction"), p.flag("circular"))?,
        Method::Gain => apply_gain(clip, p.real("gain_db"))?,
        Method::WhiteNoise => add_noise(clip, p.real("snr_db"), NoiseColor::White, rng)?,
        Method::PinkNoise => add_noise(clip, p.real("snr_db"), NoiseColor::Pink, rng)?,
        Method::Compressor => dynamic_range_compress(
            clip,
            &CompressorParams {
                threshold_db: p.real("threshold_db"),
                ratio: p.real("ratio"),
                attack_ms: p.real("attack_ms"),
                release_ms: p.real("release_ms"),
                makeup: p.flag("makeup"),
            },
        )?,
        Method::Clip => clip_distort(clip, p.real("fraction"))?,
        Method::HarmonicDistortion => {
            let n = p.int("applications");
            if n < 0 {
                return Err(precondition("harmonic distortion needs applications >= 0"));
            }
            harmonic_distort(clip, n as u32)
        }
        Method::Wow => wow_resample(clip, p.real("depth"), p.real("rate_hz"))?,
        Method::Mix => {
            let partner = partner.ok_or(AugError::MissingPartner("mix"))?;
            mix_same_class(clip, partner, p.real("weight"))?
        }
        Method::Lowpass => lowpass(clip, p.real("cutoff_hz"))?,
        Method::Highpass => highpass(clip, p.real("cutoff_hz"))?,
        _ => unreachable!("domain checked above"),
    };
    Ok(AudioOutcome { clip: out, drawn: p })
}
