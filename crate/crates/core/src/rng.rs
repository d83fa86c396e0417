//! Splittable deterministic random streams.
//!
//! A stream is identified by a 64-bit seed and an ordered path of tags
//! (file index, branch, method index, ...). The pair is hashed with SHA-256
//! into a ChaCha20 key, so each stream is a pure function of its identity and
//! unrelated to the order in which streams are created.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use sha2::{Digest, Sha256};
use std::fmt;

const DOMAIN: &[u8] = b"augkit-stream-v1";

/// One component of a stream path.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Tag {
    Str(String),
    Int(u64),
}

impl From<&str> for Tag {
    fn from(s: &str) -> Self {
        Tag::Str(s.to_owned())
    }
}

impl From<String> for Tag {
    fn from(s: String) -> Self {
        Tag::Str(s)
    }
}

impl From<u64> for Tag {
    fn from(v: u64) -> Self {
        Tag::Int(v)
    }
}

impl From<usize> for Tag {
    fn from(v: usize) -> Self {
        Tag::Int(v as u64)
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Str(s) => f.write_str(s),
            Tag::Int(v) => write!(f, "{v}"),
        }
    }
}

impl serde::Serialize for Tag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Tag::Str(v) => s.serialize_str(v),
            Tag::Int(v) => s.serialize_u64(*v),
        }
    }
}

impl<'de> serde::Deserialize<'de> for Tag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Str(String),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Int(v) => Tag::Int(v),
            Raw::Str(v) => Tag::Str(v),
        })
    }
}

/// Deterministic pseudorandom stream for one (seed, path) identity.
#[derive(Clone)]
pub struct RngStream {
    seed: u64,
    path: Vec<Tag>,
    rng: ChaCha20Rng,
}

impl fmt::Debug for RngStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RngStream")
            .field("seed", &self.seed)
            .field("path", &self.path)
            .finish_non_exhaustive()
    }
}

/// Creates the stream identified by `seed` and `path`.
pub fn derive_stream<I, T>(seed: u64, path: I) -> RngStream
where
    I: IntoIterator<Item = T>,
    T: Into<Tag>,
{
    let path: Vec<Tag> = path.into_iter().map(Into::into).collect();
    RngStream::new(seed, path)
}

fn stream_key(seed: u64, path: &[Tag]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(DOMAIN);
    h.update(seed.to_le_bytes());
    h.update((path.len() as u64).to_le_bytes());
    for tag in path {
        match tag {
            Tag::Str(s) => {
                h.update([1u8]);
                h.update((s.len() as u64).to_le_bytes());
                h.update(s.as_bytes());
            }
            Tag::Int(v) => {
                h.update([2u8]);
                h.update(v.to_le_bytes());
            }
        }
    }
    h.finalize().into()
}

impl RngStream {
    pub fn new(seed: u64, path: Vec<Tag>) -> Self {
        let rng = ChaCha20Rng::from_seed(stream_key(seed, &path));
        Self { seed, path, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path(&self) -> &[Tag] {
        &self.path
    }

    /// A fresh stream whose path extends this one's by `tag`.
    pub fn substream(&self, tag: impl Into<Tag>) -> RngStream {
        let mut path = self.path.clone();
        path.push(tag.into());
        RngStream::new(self.seed, path)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform real on `[0, 1)` with 53 bits of resolution.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform real on `[lo, hi)`; returns `lo` when the range is degenerate.
    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        let u = self.uniform();
        if hi <= lo {
            lo
        } else {
            lo + u * (hi - lo)
        }
    }

    /// Uniform integer on `[0, n)`. Panics when `n == 0`.
    pub fn uniform_int(&mut self, n: u64) -> u64 {
        assert!(n > 0, "uniform_int over an empty range");
        // Rejection sampling keeps every outcome equally likely.
        let zone = u64::MAX - (u64::MAX % n) - 1;
        loop {
            let v = self.next_u64();
            if v <= zone {
                return v % n;
            }
        }
    }

    /// Uniform integer on the inclusive range `[lo, hi]`.
    pub fn uniform_int_inclusive(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi, "empty integer range");
        let span = (hi as i128 - lo as i128 + 1) as u128;
        if span > u64::MAX as u128 {
            return self.next_u64() as i64;
        }
        lo.wrapping_add(self.uniform_int(span as u64) as i64)
    }

    /// Standard normal deviate by the Box-Muller transform (two uniforms per draw).
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
