//! Synthetic six-clip demonstration set and contact sheets.

use super::*;
use crate::audio_io::{load_manifest, write_wav};
use std::f64::consts::PI;

pub const DEMO_RATE: u32 = 44100;
pub const DEMO_SECONDS: f64 = 2.0;
pub const DEMO_SEED: u64 = 42;
pub const SHEET_COLUMNS: usize = 4;
pub const SHEET_GUTTER: u32 = 2;
pub const AUDIO_SHEET: &str = "contact_audio.png";
pub const SPEC_SHEET: &str = "contact_spec.png";
pub const INPUT_DIR: &str = "input";

fn chirp(f0: f64, f1: f64, n: usize, rate: f64) -> Vec<f64> {
    let dur = n as f64 / rate;
    (0..n)
        .map(|m| {
            let t = m as f64 / rate;
            0.5 * (2.0 * PI * (f0 * t + 0.5 * (f1 - f0) / dur * t * t)).sin()
        })
        .collect()
}

fn tone(f: f64, n: usize, rate: f64) -> Vec<f64> {
    (0..n)
        .map(|m| {
            let t = m as f64 / rate;
            let tremolo = 1.0 + 0.3 * (2.0 * PI * 3.0 * t).sin();
            let s: f64 = [1.0, 0.5, 0.25]
                .iter()
                .enumerate()
                .map(|(k, a)| a * (2.0 * PI * f * (k + 1) as f64 * t).sin())
                .sum();
            0.25 * tremolo * s
        })
        .collect()
}

fn bursts(count: usize, n: usize, rng: &mut crate::rng::RngStream) -> Vec<f64> {
    let mut out = vec![0.0; n];
    let len = n / (2 * count);
    for b in 0..count {
        let start = b * 2 * len + rng.uniform_int((len / 2) as u64) as usize;
        for k in 0..len {
            let env = (PI * k as f64 / len as f64).sin().powi(2);
            if let Some(slot) = out.get_mut(start + k) {
                *slot = 0.3 * env * rng.normal();
            }
        }
    }
    out
}

/// Six labelled 2 s clips, two per class: `(file name, label, clip)`.
pub fn demo_clips(seed: u64) -> Vec<(String, String, AudioClip)> {
    let n = (DEMO_SECONDS * DEMO_RATE as f64) as usize;
    let rate = DEMO_RATE as f64;
    let rng = |k: u64| derive_stream(seed, [Tag::from("demo"), Tag::from(k)]);
    let signals = [
        ("chirp_up", "chirp", chirp(200.0, 4000.0, n, rate)),
        ("chirp_down", "chirp", chirp(6000.0, 500.0, n, rate)),
        ("tone_a4", "tone", tone(440.0, n, rate)),
        ("tone_e4", "tone", tone(329.63, n, rate)),
        ("burst_four", "burst", bursts(4, n, &mut rng(4))),
        ("burst_six", "burst", bursts(6, n, &mut rng(5))),
    ];
    signals
        .into_iter()
        .map(|(name, label, s)| (format!("{name}.wav"), label.to_owned(), AudioClip::mono(s, DEMO_RATE).with_label(label)))
        .collect()
}

#[derive(Debug, Clone)]
pub struct DemoReport {
    pub report: RunReport,
    pub audio_sheet: PathBuf,
    pub spec_sheet: PathBuf,
    pub audio_tiles: usize,
    pub spec_tiles: usize,
}

/// Writes the demo inputs under `out_dir/input`, runs both branches into
/// `out_dir`, and tiles the first clip's original with its AugSA outputs
/// and with its AugSS outputs.
pub fn run_demo(out_dir: impl AsRef<Path>, seed: u64) -> Result<DemoReport, PipelineError> {
    let out_dir = out_dir.as_ref();
    let input = out_dir.join(INPUT_DIR);
    create_dir(&input)?;
    let mut manifest_text = String::from("path,label\n");
    for (name, label, clip) in demo_clips(seed) {
        let path = input.join(&name);
        write_wav(&clip, &path, WavEncoding::for_clip(&clip, WavCodec::Float32)).map_err(|e| PipelineError::Io {
            path: path.clone(),
            source: std::io::Error::other(e.to_string()),
        })?;
        manifest_text.push_str(&format!("{name},{label}\n"));
    }
    let manifest_path = input.join("manifest.csv");
    write_file(&manifest_path, manifest_text.as_bytes())?;
    let manifest = load_manifest(&manifest_path).map_err(|e| PipelineError::InvalidInput {
        path: manifest_path.clone(),
        message: e.to_string(),
    })?;
    let config = PipelineConfig {
        seed,
        ..PipelineConfig::default()
    };
    let (report, kept) = run_full_retaining(&manifest, &config, out_dir, Some(0))?;

    let first = &manifest.entries[0];
    let original = load_spec(&first.path, &first.label, &config.sgram).map_err(|m| PipelineError::InvalidInput {
        path: first.path.clone(),
        message: m,
    })?;
    let tiles_for = |branch: Branch| {
        std::iter::once(spectrogram_image(&original))
            .chain(kept.iter().filter(|(r, _)| r.branch == branch).map(|(_, s)| spectrogram_image(s)))
            .collect::<Vec<_>>()
    };
    let audio_tiles = tiles_for(Branch::AugSA);
    let spec_tiles = tiles_for(Branch::AugSS);
    let audio_sheet = out_dir.join(AUDIO_SHEET);
    let spec_sheet = out_dir.join(SPEC_SHEET);
    write_png(&contact_sheet(&audio_tiles, SHEET_COLUMNS, SHEET_GUTTER), &audio_sheet)?;
    write_png(&contact_sheet(&spec_tiles, SHEET_COLUMNS, SHEET_GUTTER), &spec_sheet)?;
    Ok(DemoReport {
        report,
        audio_sheet,
        spec_sheet,
        audio_tiles: audio_tiles.len(),
        spec_tiles: spec_tiles.len(),
    })
}
