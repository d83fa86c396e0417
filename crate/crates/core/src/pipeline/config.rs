use crate::dsp::{DspError, SgramConfig};
use crate::registry::{AugmenterConfig, ConfigError, Domain, Method};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which artifacts each output writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmitFlags {
    pub png: bool,
    pub raw: bool,
    /// Also write the intermediate augmented audio of AugSA outputs.
    pub wav: bool,
}

impl Default for EmitFlags {
    fn default() -> Self {
        Self {
            png: true,
            raw: false,
            wav: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub sgram: SgramConfig,
    pub audio_ops: Vec<AugmenterConfig>,
    pub spec_ops: Vec<AugmenterConfig>,
    pub emit: EmitFlags,
    pub include_original: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        use Method::*;
        let audio_ops = [
            PitchShift,
            TimeStretch,
            TimeShift,
            Gain,
            WhiteNoise,
            PinkNoise,
            Compressor,
            Clip,
            HarmonicDistortion,
            Wow,
            Mix,
        ]
        .into_iter()
        .map(AugmenterConfig::new)
        .chain([Lowpass, Highpass].into_iter().map(AugmenterConfig::disabled))
        .collect();
        let spec_ops = [SpecTimeShift, SpecFreqShift, SpecNoise, Vtln, Emda, FreqMask, TpsWarp]
            .into_iter()
            .map(AugmenterConfig::new)
            .chain(std::iter::once(AugmenterConfig::disabled(TimeMask)))
            .collect();
        Self {
            seed: 0,
            sgram: SgramConfig::default(),
            audio_ops,
            spec_ops,
            emit: EmitFlags::default(),
            include_original: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineConfigError {
    #[error("config: {0}")]
    Json(String),
    #[error("config: {0}")]
    Op(#[from] ConfigError),
    #[error("config: sgram: {0}")]
    Sgram(#[from] DspError),
    #[error("config: emit must include png or raw")]
    NoImageFormat,
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self, PipelineConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| PipelineConfigError::Json(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), PipelineConfigError> {
        self.sgram.check()?;
        for (ops, expected) in [(&self.audio_ops, Domain::Audio), (&self.spec_ops, Domain::Spectrogram)] {
            for op in ops {
                if op.method.domain() != expected {
                    return Err(ConfigError::WrongDomain {
                        method: op.method,
                        found: op.method.domain(),
                        expected,
                    }
                    .into());
                }
                op.validate()?;
            }
        }
        if !(self.emit.png || self.emit.raw) {
            return Err(PipelineConfigError::NoImageFormat);
        }
        Ok(())
    }

    /// H: enabled audio ops.
    pub fn audio_count(&self) -> usize {
        self.audio_ops.iter().filter(|o| o.enabled).count()
    }

    /// K: enabled spectrogram ops.
    pub fn spec_count(&self) -> usize {
        self.spec_ops.iter().filter(|o| o.enabled).count()
    }
}
