//! WAV decode/encode, dataset manifests and channel utilities.

mod manifest;
mod wav;

pub use manifest::{load_manifest, parse_manifest, DatasetManifest, ManifestEntry, ManifestError};
pub use wav::{decode_wav, encode_wav, read_wav, write_wav, WavCodec, WavEncoding, WavError};

use crate::clip::AudioClip;

/// Averages all channels into one; length, rate and label are kept.
pub fn to_mono(clip: &AudioClip) -> AudioClip {
    if clip.num_channels() <= 1 {
        return clip.clone();
    }
    let n = clip.num_channels() as f64;
    let mono = (0..clip.len())
        .map(|m| clip.channels.iter().map(|c| c[m]).sum::<f64>() / n)
        .collect();
    clip.with_channels(vec![mono])
}
