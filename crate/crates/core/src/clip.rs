//! Sampled waveforms.

use std::fmt;

/// A whole-file waveform held in memory.
///
/// Samples are stored channel-major: `channels[c][m]` is sample `m` of
/// channel `c`. Values may leave `[-1, 1]` between processing steps; they are
/// only clamped when encoded to an integer format.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    pub channels: Vec<Vec<f64>>,
    pub sample_rate: u32,
    pub label: Option<String>,
}

/// The first invariant an [`AudioClip`] breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClipViolation {
    NoChannels,
    EmptySignal,
    RaggedChannels,
    BadSampleRate,
    NonFiniteSample { channel: usize, index: usize },
}

impl fmt::Display for ClipViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClipViolation::NoChannels => f.write_str("no channels"),
            ClipViolation::EmptySignal => f.write_str("empty signal"),
            ClipViolation::RaggedChannels => f.write_str("channels differ in length"),
            ClipViolation::BadSampleRate => f.write_str("sample rate must be positive"),
            ClipViolation::NonFiniteSample { channel, index } => {
                write!(f, "non-finite sample (channel {channel}, index {index})")
            }
        }
    }
}

impl std::error::Error for ClipViolation {}

/// Reports the first violated clip invariant, or `Ok(())`.
pub fn validate_clip(clip: &AudioClip) -> Result<(), ClipViolation> {
    if clip.sample_rate == 0 {
        return Err(ClipViolation::BadSampleRate);
    }
    let first = clip.channels.first().ok_or(ClipViolation::NoChannels)?;
    if first.is_empty() {
        return Err(ClipViolation::EmptySignal);
    }
    if clip.channels.iter().any(|c| c.len() != first.len()) {
        return Err(ClipViolation::RaggedChannels);
    }
    for (channel, samples) in clip.channels.iter().enumerate() {
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(ClipViolation::NonFiniteSample { channel, index });
        }
    }
    Ok(())
}

impl AudioClip {
    pub fn new(channels: Vec<Vec<f64>>, sample_rate: u32) -> Self {
        Self {
            channels,
            sample_rate,
            label: None,
        }
    }

    pub fn mono(samples: Vec<f64>, sample_rate: u32) -> Self {
        Self::new(vec![samples], sample_rate)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Number of samples per channel (M).
    pub fn len(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of channels (N).
    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn duration_secs(&self) -> f64 {
        self.len() as f64 / self.sample_rate as f64
    }

    pub fn validate(&self) -> Result<(), ClipViolation> {
        validate_clip(self)
    }

    /// Same rate and label, new sample data.
    pub fn with_channels(&self, channels: Vec<Vec<f64>>) -> AudioClip {
        AudioClip {
            channels,
            sample_rate: self.sample_rate,
            label: self.label.clone(),
        }
    }

    /// Applies `f` to every channel independently.
    pub fn map_channels<F>(&self, mut f: F) -> AudioClip
    where
        F: FnMut(&[f64]) -> Vec<f64>,
    {
        self.with_channels(self.channels.iter().map(|c| f(c)).collect())
    }

    pub fn try_map_channels<F, E>(&self, mut f: F) -> Result<AudioClip, E>
    where
        F: FnMut(&[f64]) -> Result<Vec<f64>, E>,
    {
        let channels = self
            .channels
            .iter()
            .map(|c| f(c))
            .collect::<Result<Vec<_>, E>>()?;
        Ok(self.with_channels(channels))
    }

    pub fn peak(&self) -> f64 {
        self.channels
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Mean power over every sample of every channel.
    pub fn power(&self) -> f64 {
        let n = self.len() * self.num_channels();
        if n == 0 {
            return 0.0;
        }
        self.channels.iter().flatten().map(|v| v * v).sum::<f64>() / n as f64
    }
}
