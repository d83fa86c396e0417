//! The augmentation method catalogue and per-method parameter schemas.
//!
//! Randomized wrappers draw every ranged parameter in schema order, so the
//! schema order is part of the reproducibility contract.

use crate::rng::RngStream;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Domain {
    Audio,
    Spectrogram,
}

macro_rules! methods {
    ($($variant:ident => $name:literal, $domain:ident;)*) => {
        /// Every registered augmentation method.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Method {
            $($variant,)*
        }

        impl Method {
            pub const ALL: &'static [Method] = &[$(Method::$variant,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(Method::$variant => $name,)*
                }
            }

            pub fn domain(self) -> Domain {
                match self {
                    $(Method::$variant => Domain::$domain,)*
                }
            }
        }

        impl FromStr for Method {
            type Err = UnknownMethod;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($name => Ok(Method::$variant),)*
                    _ => Err(UnknownMethod(s.to_owned())),
                }
            }
        }
    };
}

methods! {
    PitchShift => "pitch_shift", Audio;
    TimeStretch => "time_stretch", Audio;
    TimeShift => "time_shift", Audio;
    Gain => "gain", Audio;
    WhiteNoise => "white_noise", Audio;
    PinkNoise => "pink_noise", Audio;
    Compressor => "compressor", Audio;
    Clip => "clip", Audio;
    HarmonicDistortion => "harmonic_distortion", Audio;
    Wow => "wow", Audio;
    Mix => "mix", Audio;
    Lowpass => "lowpass", Audio;
    Highpass => "highpass", Audio;
    SpecTimeShift => "spec_time_shift", Spectrogram;
    SpecFreqShift => "spec_freq_shift", Spectrogram;
    SpecNoise => "spec_noise", Spectrogram;
    Vtln => "vtln", Spectrogram;
    Emda => "emda", Spectrogram;
    FreqMask => "freq_mask", Spectrogram;
    TimeMask => "time_mask", Spectrogram;
    TpsWarp => "tps_warp", Spectrogram;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown method `{0}`; valid methods: {list}", list = method_list())]
pub struct UnknownMethod(pub String);

/// Comma-separated names of every registered method.
pub fn method_list() -> String {
    Method::ALL.iter().map(|m| m.name()).collect::<Vec<_>>().join(", ")
}

pub fn methods_in(domain: Domain) -> impl Iterator<Item = Method> {
    Method::ALL.iter().copied().filter(move |m| m.domain() == domain)
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A configured parameter: a fixed value, a uniform range, or a switch.
///
/// JSON form: a number, a two-element array `[lo, hi]`, or a boolean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Flag(bool),
    Fixed(f64),
    Range([f64; 2]),
}

impl ParamValue {
    pub const fn range(lo: f64, hi: f64) -> Self {
        ParamValue::Range([lo, hi])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Real,
    Int,
    Bool,
}

#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
    pub default: ParamValue,
    pub help: &'static str,
}

const fn real(name: &'static str, default: ParamValue, help: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind: ParamKind::Real,
        default,
        help,
    }
}

const fn int(name: &'static str, default: ParamValue, help: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind: ParamKind::Int,
        default,
        help,
    }
}

const fn flag(name: &'static str, default: bool, help: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind: ParamKind::Bool,
        default: ParamValue::Flag(default),
        help,
    }
}

use ParamValue::{Fixed, Range};

macro_rules! specs {
    ($($e:expr),* $(,)?) => {{
        const P: &[ParamSpec] = &[$($e),*];
        P
    }};
}

impl Method {
    /// Parameter schema in draw order, with the standard defaults.
    pub fn params(self) -> &'static [ParamSpec] {
        match self {
            Method::PitchShift => specs![real("semitones", Range([-2.0, 2.0]), "pitch change in semitones, |x| <= 24")],
            Method::TimeStretch => specs![real("factor", Range([0.8, 1.25]), "duration factor in [0.25, 4]")],
            Method::TimeShift => specs![
                real("fraction", Range([0.0, 1.0]), "shift as a fraction of the clip length, [0, 1)"),
                flag("circular", true, "rotate instead of zero-filling"),
            ],
            Method::Gain => specs![real("gain_db", Range([-6.0, 6.0]), "gain in dB")],
            Method::WhiteNoise | Method::PinkNoise => {
                specs![real("snr_db", Range([10.0, 30.0]), "signal-to-noise ratio in dB")]
            }
            Method::Compressor => specs![
                real("threshold_db", Fixed(-20.0), "threshold in dBFS, <= 0"),
                real("ratio", Fixed(4.0), "compression ratio, >= 1"),
                real("attack_ms", Fixed(5.0), "attack time in ms"),
                real("release_ms", Fixed(100.0), "release time in ms"),
                flag("makeup", true, "restore the input RMS"),
            ],
            Method::Clip => specs![real("fraction", Fixed(0.01), "fraction of samples clipped, (0, 1]")],
            Method::HarmonicDistortion => specs![int("applications", Fixed(2.0), "number of sine-shaper passes")],
            Method::Wow => specs![
                real("depth", Fixed(0.1), "read-rate modulation depth, [0, 0.5]"),
                real("rate_hz", Fixed(0.5), "modulation rate in Hz"),
            ],
            Method::Mix => specs![real("weight", Range([0.3, 0.7]), "weight of the primary clip, [0, 1]")],
            Method::Lowpass => specs![real("cutoff_hz", Range([2000.0, 8000.0]), "cutoff frequency in Hz")],
            Method::Highpass => specs![real("cutoff_hz", Range([100.0, 500.0]), "cutoff frequency in Hz")],
            Method::SpecTimeShift => specs![
                real("fraction", Range([-0.25, 0.25]), "shift as a fraction of the frame count"),
                flag("circular", true, "rotate instead of floor-filling"),
            ],
            Method::SpecFreqShift => specs![real("fraction", Range([-0.05, 0.05]), "shift as a fraction of the bin count")],
            Method::SpecNoise => specs![real("sigma_db", Range([1.0, 3.0]), "Gaussian noise std in dB")],
            Method::Vtln => specs![real("alpha", Range([0.9, 1.1]), "warp factor in [0.8, 1.2]")],
            Method::Emda => specs![
                real("weight", Range([0.3, 0.7]), "weight of the primary spectrogram, [0, 1]"),
                real("eq_max_db", Fixed(6.0), "equalizer gains drawn from [-x, x] dB"),
                int("anchors", Fixed(8.0), "number of log-spaced equalizer anchors, >= 2"),
                int("delay_cols", Range([0.0, 8.0]), "partner delay in frames"),
            ],
            Method::FreqMask => specs![real("max_fraction", Fixed(0.15), "largest mask as a fraction of the bin count")],
            Method::TimeMask => specs![real("max_fraction", Fixed(0.15), "largest mask as a fraction of the frame count")],
            Method::TpsWarp => specs![
                int("grid", Fixed(4.0), "control grid size per axis, >= 2"),
                real("sigma_fraction", Fixed(0.015), "displacement std as a fraction of min(F, T)"),
                real("lambda", Fixed(0.0), "spline regularization, >= 0"),
            ],
        }
    }

    /// Methods whose operation needs a same-class partner input.
    pub fn needs_partner(self) -> bool {
        matches!(self, Method::Mix | Method::Emda)
    }
}

/// A method plus parameter overrides. Parameters not listed take the
/// registry default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AugmenterConfig {
    pub method: Method,
    #[serde(default)]
    pub params: BTreeMap<String, ParamValue>,
    #[serde(default = "enabled_default")]
    pub enabled: bool,
}

fn enabled_default() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error(transparent)]
    UnknownMethod(#[from] UnknownMethod),
    #[error("{method}: unknown parameter `{param}`; expected one of: {expected}")]
    UnknownParam {
        method: Method,
        param: String,
        expected: String,
    },
    #[error("{method}.{param}: {message}")]
    BadParam {
        method: Method,
        param: &'static str,
        message: String,
    },
    #[error("{method} is a {found:?} method but was configured for the {expected:?} branch")]
    WrongDomain {
        method: Method,
        found: Domain,
        expected: Domain,
    },
}

/// A drawn parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drawn {
    Real(f64),
    Int(i64),
    Bool(bool),
}

impl Drawn {
    pub fn as_f64(self) -> f64 {
        match self {
            Drawn::Real(v) => v,
            Drawn::Int(v) => v as f64,
            Drawn::Bool(v) => v as u8 as f64,
        }
    }

    pub fn to_json(self) -> serde_json::Value {
        match self {
            Drawn::Real(v) => serde_json::json!(v),
            Drawn::Int(v) => serde_json::json!(v),
            Drawn::Bool(v) => serde_json::json!(v),
        }
    }
}

/// Parameter values drawn for one invocation, in schema order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DrawnParams(pub Vec<(&'static str, Drawn)>);

impl DrawnParams {
    fn lookup(&self, name: &str) -> Drawn {
        self.0
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| *v)
            .unwrap_or_else(|| panic!("parameter `{name}` not in schema"))
    }

    pub fn real(&self, name: &str) -> f64 {
        self.lookup(name).as_f64()
    }

    pub fn int(&self, name: &str) -> i64 {
        match self.lookup(name) {
            Drawn::Int(v) => v,
            other => other.as_f64().round() as i64,
        }
    }

    pub fn flag(&self, name: &str) -> bool {
        match self.lookup(name) {
            Drawn::Bool(v) => v,
            other => other.as_f64() != 0.0,
        }
    }

    pub fn to_json(&self) -> serde_json::Map<String, serde_json::Value> {
        self.0.iter().map(|(n, v)| ((*n).to_owned(), v.to_json())).collect()
    }
}

impl AugmenterConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            params: BTreeMap::new(),
            enabled: true,
        }
    }

    pub fn disabled(method: Method) -> Self {
        Self {
            enabled: false,
            ..Self::new(method)
        }
    }

    pub fn with(mut self, name: &str, value: ParamValue) -> Self {
        self.params.insert(name.to_owned(), value);
        self
    }

    /// Checks parameter names and value kinds against the schema.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let schema = self.method.params();
        for (name, value) in &self.params {
            let spec = schema.iter().find(|p| p.name == name).ok_or_else(|| ConfigError::UnknownParam {
                method: self.method,
                param: name.clone(),
                expected: schema.iter().map(|p| p.name).collect::<Vec<_>>().join(", "),
            })?;
            let bad = |message: &str| ConfigError::BadParam {
                method: self.method,
                param: spec.name,
                message: message.to_owned(),
            };
            match (spec.kind, value) {
                (ParamKind::Bool, ParamValue::Flag(_)) => {}
                (ParamKind::Bool, _) => return Err(bad("expected a boolean")),
                (_, ParamValue::Flag(_)) => return Err(bad("expected a number or [lo, hi] range")),
                (_, ParamValue::Fixed(v)) if !v.is_finite() => return Err(bad("value must be finite")),
                (_, ParamValue::Range([lo, hi])) => {
                    if !(lo.is_finite() && hi.is_finite()) {
                        return Err(bad("range bounds must be finite"));
                    }
                    if lo > hi {
                        return Err(bad("range lower bound exceeds upper bound"));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn value_of(&self, spec: &ParamSpec) -> ParamValue {
        self.params.get(spec.name).copied().unwrap_or(spec.default)
    }

    /// Draws every parameter in schema order. Ranges consume one draw each;
    /// fixed values and flags consume none.
    pub fn draw(&self, rng: &mut RngStream) -> DrawnParams {
        let drawn = self
            .method
            .params()
            .iter()
            .map(|spec| {
                let v = match (spec.kind, self.value_of(spec)) {
                    (_, ParamValue::Flag(b)) => Drawn::Bool(b),
                    (ParamKind::Int, ParamValue::Fixed(v)) => Drawn::Int(v.round() as i64),
                    (ParamKind::Int, ParamValue::Range([lo, hi])) => {
                        let (lo, hi) = (lo.ceil() as i64, hi.floor() as i64);
                        Drawn::Int(if lo >= hi { lo } else { rng.uniform_int_inclusive(lo, hi) })
                    }
                    (_, ParamValue::Fixed(v)) => Drawn::Real(v),
                    (_, ParamValue::Range([lo, hi])) => Drawn::Real(rng.uniform_range(lo, hi)),
                };
                (spec.name, v)
            })
            .collect();
        DrawnParams(drawn)
    }
}
