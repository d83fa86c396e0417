//! Deterministic audio data augmentation.
//!
//! The crate provides a catalogue of raw-audio augmenters ([`audio_aug`]),
//! spectrogram augmenters ([`spec_aug`]), the signal kernels they share
//! ([`dsp`]), WAV and manifest I/O ([`audio_io`]) and a two-branch batch
//! pipeline ([`pipeline`]) that turns a labelled dataset into augmented
//! spectrogram images with a replayable provenance log.
//!
//! Every random decision is drawn from an [`RngStream`] keyed by a seed and a
//! path of tags, so outputs do not depend on processing order or thread count.

pub mod audio_aug;
pub mod audio_io;
pub mod clip;
pub mod dsp;
pub mod pipeline;
pub mod registry;
pub mod rng;
pub mod spec_aug;
pub mod spectrogram;

pub use audio_io::{DatasetManifest, ManifestEntry, WavCodec, WavEncoding};
pub use clip::{validate_clip, AudioClip, ClipViolation};
pub use registry::{AugmenterConfig, Domain, Method, ParamValue};
pub use rng::{derive_stream, RngStream, Tag};
pub use spectrogram::Spectrogram;
