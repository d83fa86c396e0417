//! Two-branch batch augmentation over a labelled manifest.
//!
//! Entry `i` and enabled audio op `h` draw from stream `[i, "audio", h]`;
//! spectrogram op `k` from `[i, "spec", k]`. Partners for mixing ops are
//! chosen from `[i, branch, op, "partner"]`. Work items are independent,
//! so outputs do not depend on thread count or scheduling.

mod config;
pub mod demo;
pub mod export;

pub use config::{EmitFlags, PipelineConfig, PipelineConfigError};
pub use export::{
    contact_sheet, decode_raw, encode_raw, encode_spectrogram, export_spectrogram, read_raw, spectrogram_image,
    write_png, ExportError, GrayImage, ImageFormat, RawError,
};

use crate::audio_aug;
use crate::audio_io::{encode_wav, read_wav, DatasetManifest, ManifestEntry, WavCodec, WavEncoding};
use crate::clip::AudioClip;
use crate::dsp::{sgram, SgramConfig};
use crate::registry::AugmenterConfig;
use crate::rng::{derive_stream, Tag};
use crate::spec_aug;
use crate::spectrogram::Spectrogram;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const MANIFEST_FILE: &str = "augmented.csv";
pub const PROVENANCE_FILE: &str = "provenance.json";
pub const IMAGE_DIR: &str = "images";
pub const AUDIO_DIR: &str = "audio";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    AugSA,
    AugSS,
    #[serde(rename = "original")]
    Original,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::AugSA => "AugSA",
            Branch::AugSS => "AugSS",
            Branch::Original => "original",
        }
    }

    fn stream_tag(self) -> &'static str {
        match self {
            Branch::AugSA => "audio",
            Branch::AugSS => "spec",
            Branch::Original => "original",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
}

/// One output (or one skipped output) with everything needed to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceRecord {
    /// Input path as written in the manifest.
    pub source: String,
    pub label: String,
    pub branch: Branch,
    pub method: String,
    /// Position of the op in its config list.
    pub op_index: Option<usize>,
    pub seed: u64,
    pub stream: Vec<Tag>,
    pub config: Option<AugmenterConfig>,
    pub sgram: SgramConfig,
    pub params: Map<String, Value>,
    pub extras: Map<String, Value>,
    pub partner: Option<String>,
    /// Written files, relative to the output directory.
    pub outputs: Vec<String>,
    pub status: Status,
    pub error: Option<String>,
}

impl ProvenanceRecord {
    pub fn is_ok(&self) -> bool {
        self.status == Status::Ok
    }

    /// The image listed in the augmented manifest.
    pub fn primary_output(&self) -> Option<&str> {
        self.outputs
            .iter()
            .find(|o| o.ends_with(".png"))
            .or_else(|| self.outputs.iter().find(|o| o.ends_with(".agms")))
            .map(String::as_str)
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] PipelineConfigError),
    #[error("no ops enabled")]
    NoOps,
    #[error("empty manifest")]
    EmptyManifest,
    #[error("cannot create {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Export(#[from] ExportError),
    #[error("{path}: {message}")]
    InvalidInput { path: PathBuf, message: String },
    #[error("replay: {0}")]
    Replay(String),
}

impl PipelineError {
    /// 1 I/O, 2 config, 3 data validation.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) | PipelineError::NoOps => 2,
            PipelineError::Io { .. } | PipelineError::Export(ExportError::Write { .. } | ExportError::Read { .. }) => 1,
            PipelineError::Export(ExportError::Png(_)) => 1,
            PipelineError::Export(ExportError::Invalid(_)) => 3,
            PipelineError::EmptyManifest | PipelineError::InvalidInput { .. } | PipelineError::Replay(_) => 3,
        }
    }
}

/// Per-branch output counts of a run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub audio: usize,
    pub spec: usize,
    pub original: usize,
    pub failed: usize,
    /// `source [branch/method]: error` per failed record.
    pub failures: Vec<String>,
}

impl RunSummary {
    pub fn from_records(records: &[ProvenanceRecord]) -> Self {
        let mut s = RunSummary::default();
        for r in records {
            match (r.status, r.branch) {
                (Status::Failed, _) => {
                    s.failed += 1;
                    s.failures.push(format!(
                        "{} [{}/{}]: {}",
                        r.source,
                        r.branch,
                        r.method,
                        r.error.as_deref().unwrap_or("failed")
                    ));
                }
                (Status::Ok, Branch::AugSA) => s.audio += 1,
                (Status::Ok, Branch::AugSS) => s.spec += 1,
                (Status::Ok, Branch::Original) => s.original += 1,
            }
        }
        s
    }

    pub fn outputs(&self) -> usize {
        self.audio + self.spec + self.original
    }
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} AugSA outputs, {} AugSS outputs, {} original outputs, {} failed",
            self.audio, self.spec, self.original, self.failed
        )
    }
}

/// Records of a run plus its summary.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub records: Vec<ProvenanceRecord>,
    pub summary: RunSummary,
}

#[derive(Debug, Clone, Copy, Default)]
struct Branches {
    audio: bool,
    spec: bool,
    original: bool,
}

fn is_raw_path(path: &Path) -> bool {
    path.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("agms"))
}

fn resolve(base_dir: &Path, source: &str) -> PathBuf {
    let p = Path::new(source);
    if p.is_absolute() {
        p.to_owned()
    } else {
        base_dir.join(p)
    }
}

/// Output stems, suffixed with `-<index>` where file stems collide.
fn unique_stems(manifest: &DatasetManifest) -> Vec<String> {
    let stems: Vec<String> = manifest
        .entries
        .iter()
        .map(|e| {
            e.path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "input".into())
        })
        .collect();
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for s in &stems {
        *counts.entry(s.as_str()).or_default() += 1;
    }
    stems
        .iter()
        .enumerate()
        .map(|(i, s)| if counts[s.as_str()] > 1 { format!("{s}-{i}") } else { s.clone() })
        .collect()
}

fn load_clip(path: &Path, label: &str) -> Result<AudioClip, String> {
    if is_raw_path(path) {
        return Err("audio branch needs a WAV input".into());
    }
    read_wav(path).map(|c| c.with_label(label)).map_err(|e| e.to_string())
}

fn load_spec(path: &Path, label: &str, cfg: &SgramConfig) -> Result<Spectrogram, String> {
    if is_raw_path(path) {
        let bytes = std::fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let mut spec = decode_raw(&bytes).map_err(|e| e.to_string())?;
        spec.label = Some(label.to_owned());
        Ok(spec)
    } else {
        let clip = load_clip(path, label)?;
        sgram(&clip, cfg).map_err(|e| e.to_string())
    }
}

fn usable_partners(manifest: &DatasetManifest, config: &PipelineConfig, branches: Branches) -> Vec<bool> {
    let wanted = |ops: &[AugmenterConfig], on: bool| on && ops.iter().any(|o| o.enabled && o.method.needs_partner());
    let audio = wanted(&config.audio_ops, branches.audio);
    let spec = wanted(&config.spec_ops, branches.spec);
    if !audio && !spec {
        return vec![true; manifest.len()];
    }
    manifest
        .entries
        .par_iter()
        .map(|e| {
            (!audio || load_clip(&e.path, &e.label).is_ok())
                && (!spec || load_spec(&e.path, &e.label, &config.sgram).is_ok())
        })
        .collect()
}

/// Crops or floor-pads `b`'s columns to `frames`.
fn fit_frames(b: &Spectrogram, frames: usize) -> Spectrogram {
    if b.frames == frames {
        return b.clone();
    }
    let mut values = Vec::with_capacity(b.bins * frames);
    for r in 0..b.bins {
        let row = b.row(r);
        values.extend((0..frames).map(|t| row.get(t).copied().unwrap_or(b.dyn_floor)));
    }
    Spectrogram {
        values,
        frames,
        ..b.clone()
    }
}

/// The artifacts of one successful output.
struct Rendered {
    spec: Spectrogram,
    audio: Option<AudioClip>,
    params: Map<String, Value>,
    extras: Map<String, Value>,
}

struct Job<'a> {
    branch: Branch,
    op_index: Option<usize>,
    op: Option<&'a AugmenterConfig>,
    partner: Option<usize>,
}

struct Ctx<'a> {
    manifest: &'a DatasetManifest,
    config: &'a PipelineConfig,
    out_dir: &'a Path,
    stems: Vec<String>,
    branches: Branches,
    /// Entry whose spectrograms are kept in memory.
    retain: Option<usize>,
    /// Entries that load cleanly and may serve as partners.
    usable: Vec<bool>,
}

struct EntryResult {
    records: Vec<ProvenanceRecord>,
    kept: Vec<(ProvenanceRecord, Spectrogram)>,
}

fn partner_for(seed: u64, ctx: &Ctx, i: usize, branch: Branch, op: usize) -> Option<usize> {
    let mut candidates = ctx.manifest.same_class_partners(i);
    candidates.retain(|&j| ctx.usable[j]);
    if candidates.is_empty() {
        return None;
    }
    let mut rng = derive_stream(seed, [Tag::from(i), branch.stream_tag().into(), op.into(), "partner".into()]);
    Some(candidates[rng.uniform_int(candidates.len() as u64) as usize])
}

fn render_audio(
    op: &AugmenterConfig,
    stream: &[Tag],
    seed: u64,
    clip: &AudioClip,
    partner: Option<&AudioClip>,
    cfg: &SgramConfig,
) -> Result<Rendered, String> {
    let mut rng = derive_stream(seed, stream.iter().cloned());
    let out = audio_aug::randomized(op, &mut rng, clip, partner).map_err(|e| e.to_string())?;
    let spec = sgram(&out.clip, cfg).map_err(|e| e.to_string())?;
    Ok(Rendered {
        spec,
        audio: Some(out.clip),
        params: out.drawn.to_json(),
        extras: Map::new(),
    })
}

fn render_spec(
    op: &AugmenterConfig,
    stream: &[Tag],
    seed: u64,
    spec: &Spectrogram,
    partner: Option<&Spectrogram>,
) -> Result<Rendered, String> {
    let mut rng = derive_stream(seed, stream.iter().cloned());
    let fitted = partner.map(|p| fit_frames(p, spec.frames));
    let out = spec_aug::randomized(op, &mut rng, spec, fitted.as_ref()).map_err(|e| e.to_string())?;
    Ok(Rendered {
        spec: out.spec,
        audio: None,
        params: out.drawn.to_json(),
        extras: out.extras,
    })
}

fn output_names(stem: &str, branch: Branch, method: &str, op_index: usize, emit: EmitFlags) -> Vec<String> {
    let base = format!("{stem}__{branch}__{method}__{op_index}");
    let mut out = Vec::new();
    if emit.png {
        out.push(format!("{IMAGE_DIR}/{base}.png"));
    }
    if emit.raw {
        out.push(format!("{IMAGE_DIR}/{base}.agms"));
    }
    if emit.wav && branch == Branch::AugSA {
        out.push(format!("{AUDIO_DIR}/{base}.wav"));
    }
    out
}

/// Bytes for each output name, keyed by extension.
fn encode_outputs(names: &[String], r: &Rendered) -> Result<Vec<Vec<u8>>, PipelineError> {
    names
        .iter()
        .map(|name| {
            if name.ends_with(".png") {
                Ok(encode_spectrogram(&r.spec, ImageFormat::Png)?)
            } else if name.ends_with(".agms") {
                Ok(encode_spectrogram(&r.spec, ImageFormat::Raw)?)
            } else {
                let clip = r.audio.as_ref().ok_or_else(|| PipelineError::Replay(format!("{name}: no audio")))?;
                encode_wav(clip, WavEncoding::for_clip(clip, WavCodec::Float32))
                    .map_err(|e| PipelineError::Replay(format!("{name}: {e}")))
            }
        })
        .collect()
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    std::fs::write(path, bytes).map_err(|source| PipelineError::Export(ExportError::Write {
        path: path.to_owned(),
        source,
    }))
}

impl Ctx<'_> {
    fn record(&self, i: usize, job: &Job) -> ProvenanceRecord {
        let e = &self.manifest.entries[i];
        let method = job.op.map(|o| o.method.name().to_owned()).unwrap_or_else(|| "sgram".into());
        let stream = match job.op_index {
            Some(h) => vec![Tag::from(i), job.branch.stream_tag().into(), h.into()],
            None => Vec::new(),
        };
        ProvenanceRecord {
            source: e.source.clone(),
            label: e.label.clone(),
            branch: job.branch,
            method,
            op_index: job.op_index,
            seed: self.config.seed,
            stream,
            config: job.op.cloned(),
            sgram: self.config.sgram,
            params: Map::new(),
            extras: Map::new(),
            partner: job.partner.map(|j| self.manifest.entries[j].source.clone()),
            outputs: Vec::new(),
            status: Status::Ok,
            error: None,
        }
    }

    fn jobs(&self, i: usize) -> Vec<Job<'_>> {
        let mut jobs = Vec::new();
        let seed = self.config.seed;
        if self.branches.original {
            jobs.push(Job {
                branch: Branch::Original,
                op_index: None,
                op: None,
                partner: None,
            });
        }
        for (branch, ops, on) in [
            (Branch::AugSA, &self.config.audio_ops, self.branches.audio),
            (Branch::AugSS, &self.config.spec_ops, self.branches.spec),
        ] {
            if !on {
                continue;
            }
            for (h, op) in ops.iter().enumerate().filter(|(_, o)| o.enabled) {
                let partner = if op.method.needs_partner() {
                    partner_for(seed, self, i, branch, h)
                } else {
                    None
                };
                jobs.push(Job {
                    branch,
                    op_index: Some(h),
                    op: Some(op),
                    partner,
                });
            }
        }
        jobs
    }

    fn run_entry(&self, i: usize) -> Result<EntryResult, PipelineError> {
        let e: &ManifestEntry = &self.manifest.entries[i];
        let cfg = &self.config.sgram;
        let seed = self.config.seed;
        let jobs = self.jobs(i);
        let needs_clip = jobs.iter().any(|j| j.branch == Branch::AugSA)
            || (!is_raw_path(&e.path) && !jobs.is_empty());
        let mut result = EntryResult {
            records: Vec::new(),
            kept: Vec::new(),
        };
        let fail_all = |result: &mut EntryResult, stage: &str, msg: &str| {
            // one failed record per requested branch
            let mut seen = Vec::new();
            for job in &jobs {
                if seen.contains(&job.branch) {
                    continue;
                }
                seen.push(job.branch);
                let mut r = self.record(i, &Job {
                    branch: job.branch,
                    op_index: None,
                    op: None,
                    partner: None,
                });
                r.method = stage.into();
                r.status = Status::Failed;
                r.error = Some(msg.into());
                result.records.push(r);
            }
        };
        let clip = if needs_clip && !is_raw_path(&e.path) {
            match load_clip(&e.path, &e.label) {
                Ok(c) => Some(c),
                Err(msg) => {
                    fail_all(&mut result, "decode", &msg);
                    return Ok(result);
                }
            }
        } else {
            None
        };
        let needs_spec = jobs.iter().any(|j| j.branch != Branch::AugSA);
        let spec = if needs_spec {
            let s = match &clip {
                Some(c) => sgram(c, cfg).map_err(|e| e.to_string()),
                None => load_spec(&e.path, &e.label, cfg),
            };
            match s {
                Ok(s) => Some(s),
                Err(msg) => {
                    fail_all(&mut result, "sgram", &msg);
                    return Ok(result);
                }
            }
        } else {
            None
        };

        let mut clip_cache: HashMap<usize, Result<AudioClip, String>> = HashMap::new();
        let mut spec_cache: HashMap<usize, Result<Spectrogram, String>> = HashMap::new();
        for job in &jobs {
            let mut rec = self.record(i, job);
            let rendered = match (job.branch, job.op) {
                (Branch::Original, _) => Ok(Rendered {
                    spec: spec.clone().expect("spectrogram computed"),
                    audio: None,
                    params: Map::new(),
                    extras: Map::new(),
                }),
                (_, Some(op)) if op.method.needs_partner() && job.partner.is_none() => {
                    Err(format!("no same-class partner for {}", op.method))
                }
                (Branch::AugSA, Some(op)) => {
                    let clip = clip.as_ref().expect("clip loaded");
                    let partner = job.partner.map(|j| {
                        clip_cache
                            .entry(j)
                            .or_insert_with(|| {
                                let pe = &self.manifest.entries[j];
                                load_clip(&pe.path, &pe.label).map_err(|m| format!("partner {}: {m}", pe.source))
                            })
                            .clone()
                    });
                    match partner.transpose() {
                        Ok(p) => render_audio(op, &rec.stream, seed, clip, p.as_ref(), cfg),
                        Err(m) => Err(m),
                    }
                }
                (Branch::AugSS, Some(op)) => {
                    let spec = spec.as_ref().expect("spectrogram computed");
                    let partner = job.partner.map(|j| {
                        spec_cache
                            .entry(j)
                            .or_insert_with(|| {
                                let pe = &self.manifest.entries[j];
                                load_spec(&pe.path, &pe.label, cfg).map_err(|m| format!("partner {}: {m}", pe.source))
                            })
                            .clone()
                    });
                    match partner.transpose() {
                        Ok(p) => render_spec(op, &rec.stream, seed, spec, p.as_ref()),
                        Err(m) => Err(m),
                    }
                }
                _ => unreachable!("augmentation jobs carry an op"),
            };
            match rendered {
                Ok(r) => {
                    let names = output_names(
                        &self.stems[i],
                        job.branch,
                        &rec.method,
                        job.op_index.unwrap_or(0),
                        self.config.emit,
                    );
                    for (name, bytes) in names.iter().zip(encode_outputs(&names, &r)?) {
                        write_file(&self.out_dir.join(name), &bytes)?;
                    }
                    rec.outputs = names;
                    rec.params = r.params;
                    rec.extras = r.extras;
                    if self.retain == Some(i) {
                        result.kept.push((rec.clone(), r.spec));
                    }
                }
                Err(msg) => {
                    rec.status = Status::Failed;
                    rec.error = Some(msg);
                }
            }
            result.records.push(rec);
        }
        Ok(result)
    }
}

fn create_dir(path: &Path) -> Result<(), PipelineError> {
    std::fs::create_dir_all(path).map_err(|source| PipelineError::Io {
        path: path.to_owned(),
        source,
    })
}

fn run(
    manifest: &DatasetManifest,
    config: &PipelineConfig,
    out_dir: &Path,
    branches: Branches,
    retain: Option<usize>,
) -> Result<(Vec<ProvenanceRecord>, Vec<(ProvenanceRecord, Spectrogram)>), PipelineError> {
    config.validate()?;
    if manifest.is_empty() {
        return Err(PipelineError::EmptyManifest);
    }
    if branches.spec {
        // AGMS inputs are checked before any output is written.
        for e in manifest.entries.iter().filter(|e| is_raw_path(&e.path)) {
            if let Ok(bytes) = std::fs::read(&e.path) {
                if let Err(err) = decode_raw(&bytes) {
                    return Err(PipelineError::InvalidInput {
                        path: e.path.clone(),
                        message: err.to_string(),
                    });
                }
            }
        }
    }
    create_dir(&out_dir.join(IMAGE_DIR))?;
    if config.emit.wav && branches.audio {
        create_dir(&out_dir.join(AUDIO_DIR))?;
    }
    let ctx = Ctx {
        manifest,
        config,
        out_dir,
        stems: unique_stems(manifest),
        branches,
        retain,
        usable: usable_partners(manifest, config, branches),
    };
    let results = (0..manifest.len())
        .into_par_iter()
        .map(|i| ctx.run_entry(i))
        .collect::<Result<Vec<_>, _>>()?;
    let mut records = Vec::new();
    let mut kept = Vec::new();
    for r in results {
        records.extend(r.records);
        kept.extend(r.kept);
    }
    Ok((records, kept))
}

/// AugSA branch: H randomized audio ops per entry, each converted to a
/// spectrogram. Adds originals when `include_original` is set.
pub fn augment_from_audio(
    manifest: &DatasetManifest,
    config: &PipelineConfig,
    out_dir: impl AsRef<Path>,
) -> Result<Vec<ProvenanceRecord>, PipelineError> {
    let branches = Branches {
        audio: true,
        spec: false,
        original: config.include_original,
    };
    Ok(run(manifest, config, out_dir.as_ref(), branches, None)?.0)
}

/// AugSS branch: K randomized spectrogram ops per entry. Entries may be
/// WAV files (converted first) or AGMS raw spectrograms.
pub fn augment_from_spectrogram(
    manifest: &DatasetManifest,
    config: &PipelineConfig,
    out_dir: impl AsRef<Path>,
) -> Result<Vec<ProvenanceRecord>, PipelineError> {
    let branches = Branches {
        audio: false,
        spec: true,
        original: false,
    };
    Ok(run(manifest, config, out_dir.as_ref(), branches, None)?.0)
}

/// Writes `augmented.csv` (successful outputs, record order).
pub fn write_augmented_manifest(records: &[ProvenanceRecord], out_dir: &Path) -> Result<(), PipelineError> {
    let path = out_dir.join(MANIFEST_FILE);
    let io = |e: csv::Error| PipelineError::Io {
        path: path.clone(),
        source: std::io::Error::other(e.to_string()),
    };
    let mut w = csv::Writer::from_path(&path).map_err(io)?;
    w.write_record(["path", "label", "source", "branch", "method"]).map_err(io)?;
    for r in records.iter().filter(|r| r.is_ok()) {
        if let Some(out) = r.primary_output() {
            w.write_record([out, &r.label, &r.source, r.branch.as_str(), &r.method]).map_err(io)?;
        }
    }
    w.flush().map_err(|e| PipelineError::Io {
        path: path.clone(),
        source: e,
    })
}

pub fn write_provenance(records: &[ProvenanceRecord], out_dir: &Path) -> Result<(), PipelineError> {
    let mut text = serde_json::to_string_pretty(records).expect("records serialize");
    text.push('\n');
    write_file(&out_dir.join(PROVENANCE_FILE), text.as_bytes())
}

pub fn read_provenance(path: impl AsRef<Path>) -> Result<Vec<ProvenanceRecord>, PipelineError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.to_owned(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| PipelineError::InvalidInput {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

pub(crate) fn run_full_retaining(
    manifest: &DatasetManifest,
    config: &PipelineConfig,
    out_dir: &Path,
    retain: Option<usize>,
) -> Result<(RunReport, Vec<(ProvenanceRecord, Spectrogram)>), PipelineError> {
    if config.audio_count() + config.spec_count() == 0 {
        return Err(PipelineError::NoOps);
    }
    let branches = Branches {
        audio: true,
        spec: true,
        original: config.include_original,
    };
    let (records, kept) = run(manifest, config, out_dir, branches, retain)?;
    write_augmented_manifest(&records, out_dir)?;
    write_provenance(&records, out_dir)?;
    let summary = RunSummary::from_records(&records);
    Ok((RunReport { records, summary }, kept))
}

/// Both branches, then `augmented.csv` and `provenance.json`.
pub fn run_full(
    manifest: &DatasetManifest,
    config: &PipelineConfig,
    out_dir: impl AsRef<Path>,
) -> Result<RunReport, PipelineError> {
    Ok(run_full_retaining(manifest, config, out_dir.as_ref(), None)?.0)
}

/// Regenerates the files of `record`, returning `(relative path, bytes)`.
/// Relative sources resolve against `base_dir` (the manifest's directory).
pub fn replay(record: &ProvenanceRecord, base_dir: impl AsRef<Path>) -> Result<Vec<(String, Vec<u8>)>, PipelineError> {
    let base_dir = base_dir.as_ref();
    if !record.is_ok() {
        return Err(PipelineError::Replay("record is flagged failed".into()));
    }
    let replay_err = PipelineError::Replay;
    let source = resolve(base_dir, &record.source);
    let rendered = match (record.branch, &record.config) {
        (Branch::Original, _) => Rendered {
            spec: load_spec(&source, &record.label, &record.sgram).map_err(replay_err)?,
            audio: None,
            params: Map::new(),
            extras: Map::new(),
        },
        (Branch::AugSA, Some(op)) => {
            let clip = load_clip(&source, &record.label).map_err(replay_err)?;
            let partner = record
                .partner
                .as_ref()
                .map(|p| load_clip(&resolve(base_dir, p), &record.label))
                .transpose()
                .map_err(replay_err)?;
            render_audio(op, &record.stream, record.seed, &clip, partner.as_ref(), &record.sgram).map_err(replay_err)?
        }
        (Branch::AugSS, Some(op)) => {
            let spec = load_spec(&source, &record.label, &record.sgram).map_err(replay_err)?;
            let partner = record
                .partner
                .as_ref()
                .map(|p| load_spec(&resolve(base_dir, p), &record.label, &record.sgram))
                .transpose()
                .map_err(replay_err)?;
            render_spec(op, &record.stream, record.seed, &spec, partner.as_ref()).map_err(replay_err)?
        }
        _ => return Err(PipelineError::Replay("augmentation record without config".into())),
    };
    if rendered.params != record.params || rendered.extras != record.extras {
        return Err(PipelineError::Replay("drawn values differ from the record".into()));
    }
    let bytes = encode_outputs(&record.outputs, &rendered)?;
    Ok(record.outputs.iter().cloned().zip(bytes).collect())
}
