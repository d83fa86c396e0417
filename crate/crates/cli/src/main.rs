use augkit::audio_io::{load_manifest, read_wav, ManifestError};
use augkit::dsp::{sgram, DspError, SgramConfig};
use augkit::pipeline::{
    self, demo, export_spectrogram, EmitFlags, ImageFormat, PipelineConfig, PipelineError,
    ProvenanceRecord, RunSummary,
};
use augkit::registry::{methods_in, Domain, Method, ParamKind, ParamValue};
use augkit::{DatasetManifest, ManifestEntry};
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const SEED_ENV: &str = "AGM_SEED";

#[derive(Parser)]
#[command(name = "augkit", version, about = "Deterministic audio and spectrogram augmentation")]
struct Cli {
    /// Worker threads (default: logical cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert one WAV file to a spectrogram image.
    Sgram(SgramArgs),
    /// AugSA branch: randomized audio ops, each rendered as a spectrogram.
    AugmentAudio(AugmentArgs),
    /// AugSS branch: randomized spectrogram ops.
    AugmentSpec(AugmentSpecArgs),
    /// Both branches plus augmented.csv and provenance.json.
    Run(RunArgs),
    /// Synthesize six labelled clips, run both branches, write contact sheets.
    Demo(DemoArgs),
    /// Print the JSON config schema or the default config.
    #[command(long_about = config_doc())]
    Config(ConfigArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Png,
    Raw,
}

#[derive(Args)]
struct SgramArgs {
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    win: Option<u64>,
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    hop: Option<u64>,
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    fft: Option<u64>,
    #[arg(long, value_name = "DB")]
    dynrange: Option<f64>,
    /// Defaults to raw for `.agms` outputs, png otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Overrides the config seed; falls back to AGM_SEED, then 0.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    #[arg(long, value_name = "JSON")]
    config: Option<PathBuf>,
    /// Comma list of png, raw, wav; `both` means png,raw.
    #[arg(long, value_name = "LIST")]
    emit: Option<String>,
    /// Replace the outputs of a previous run in DIR.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct AugmentArgs {
    #[arg(long, value_name = "CSV")]
    manifest: PathBuf,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    include_original: bool,
}

#[derive(Args)]
struct AugmentSpecArgs {
    #[arg(long, value_name = "CSV", conflicts_with = "raw_dir", required_unless_present = "raw_dir")]
    manifest: Option<PathBuf>,
    /// Directory laid out as DIR/<label>/*.agms.
    #[arg(long, value_name = "DIR")]
    raw_dir: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_name = "CSV")]
    manifest: PathBuf,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    include_original: bool,
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Falls back to AGM_SEED, then 42.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
}

#[derive(Args)]
struct ConfigArgs {
    /// Print the default config as JSON instead of the schema.
    #[arg(long)]
    defaults: bool,
}

struct Failure {
    code: &'static str,
    exit: u8,
    message: String,
}

impl Failure {
    fn new(exit: u8, message: impl Into<String>) -> Self {
        let code = match exit {
            1 => "io",
            2 => "config",
            _ => "validation",
        };
        Self {
            code,
            exit,
            message: message.into(),
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure::new(e.exit_code() as u8, e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn method_help() -> String {
    let mut s = String::new();
    for (domain, title) in [(Domain::Audio, "Audio methods"), (Domain::Spectrogram, "Spectrogram methods")] {
        let names: Vec<_> = methods_in(domain).map(Method::name).collect();
        let _ = writeln!(s, "{title}: {}", names.join(", "));
    }
    s.push_str("Run `augkit --help config` for the config schema.");
    s
}

fn format_value(v: &ParamValue) -> String {
    match v {
        ParamValue::Flag(b) => b.to_string(),
        ParamValue::Fixed(x) => x.to_string(),
        ParamValue::Range([lo, hi]) => format!("[{lo}, {hi}]"),
    }
}

fn config_doc() -> String {
    let mut s = String::from(
        "Print the JSON config schema or the default config.\n\n\
         The config file mirrors PipelineConfig; every field is optional:\n\
         {\n  \"seed\": u64,\n  \"sgram\": {\"window_len\": 1024, \"hop\": 256, \"fft_size\": 1024, \"dynrange_db\": 60},\n  \
         \"audio_ops\": [op, ...],\n  \"spec_ops\": [op, ...],\n  \
         \"emit\": {\"png\": true, \"raw\": false, \"wav\": false},\n  \"include_original\": false\n}\n\
         op = {\"method\": name, \"params\": {name: value}, \"enabled\": true}\n\
         A value is a number (fixed), [lo, hi] (drawn uniformly per output) or a boolean.\n\
         Flags override the config file; the config file overrides defaults.\n",
    );
    for domain in [Domain::Audio, Domain::Spectrogram] {
        let _ = writeln!(s, "\n{domain:?} methods:");
        for m in methods_in(domain) {
            let _ = writeln!(s, "  {}", m.name());
            for p in m.params() {
                let kind = match p.kind {
                    ParamKind::Real => "real",
                    ParamKind::Int => "int",
                    ParamKind::Bool => "bool",
                };
                let _ = writeln!(s, "    {:<15} {kind:<4} default {:<14} {}", p.name, format_value(&p.default), p.help);
            }
        }
    }
    s
}

fn env_seed() -> Result<Option<u64>, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::new(2, format!("{SEED_ENV}: invalid seed `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn parse_emit(list: &str) -> Result<EmitFlags, Failure> {
    let mut emit = EmitFlags {
        png: false,
        raw: false,
        wav: false,
    };
    for item in list.split(',').map(str::trim) {
        match item {
            "png" => emit.png = true,
            "raw" => emit.raw = true,
            "wav" => emit.wav = true,
            "both" => {
                emit.png = true;
                emit.raw = true;
            }
            other => return Err(Failure::new(2, format!("--emit: unknown format `{other}`; expected png, raw, wav, both"))),
        }
    }
    if !(emit.png || emit.raw) {
        emit.png = true;
    }
    Ok(emit)
}

/// Defaults, then the config file, then AGM_SEED (only when the file sets
/// no seed), then flags.
fn resolve_config(common: &Common, include_original: Option<bool>) -> Result<PipelineConfig, Failure> {
    let (mut cfg, file_seed) = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::new(1, format!("cannot read config {}: {e}", path.display())))?;
            let has_seed = serde_json::from_str::<serde_json::Value>(&text)
                .ok()
                .and_then(|v| v.get("seed").cloned())
                .is_some();
            let cfg = PipelineConfig::from_json(&text).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))?;
            (cfg, has_seed)
        }
        None => (PipelineConfig::default(), false),
    };
    if !file_seed {
        if let Some(s) = env_seed()? {
            cfg.seed = s;
        }
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(list) = &common.emit {
        cfg.emit = parse_emit(list)?;
    }
    if include_original == Some(true) {
        cfg.include_original = true;
    }
    cfg.validate().map_err(|e| Failure::new(2, e.to_string()))?;
    Ok(cfg)
}

fn manifest_failure(e: ManifestError) -> Failure {
    let exit = if matches!(e, ManifestError::Read { .. }) { 1 } else { 3 };
    Failure::new(exit, e.to_string())
}

const ARTIFACTS: [&str; 6] = [
    pipeline::IMAGE_DIR,
    pipeline::AUDIO_DIR,
    pipeline::MANIFEST_FILE,
    pipeline::PROVENANCE_FILE,
    demo::AUDIO_SHEET,
    demo::SPEC_SHEET,
];

/// Refuses a directory holding earlier outputs unless `force`, in which
/// case those outputs are removed.
fn prepare_out(out: &Path, force: bool) -> CliResult {
    let existing: Vec<PathBuf> = ARTIFACTS.iter().map(|a| out.join(a)).filter(|p| p.exists()).collect();
    if existing.is_empty() {
        return Ok(());
    }
    if !force {
        return Err(Failure::new(
            2,
            format!("{} already holds outputs; pass --force to replace them", out.display()),
        ));
    }
    for p in existing {
        let r = if p.is_dir() {
            std::fs::remove_dir_all(&p)
        } else {
            std::fs::remove_file(&p)
        };
        r.map_err(|e| Failure::new(1, format!("cannot remove {}: {e}", p.display())))?;
    }
    Ok(())
}

fn finish(records: &[ProvenanceRecord], out: &Path) -> CliResult {
    pipeline::write_augmented_manifest(records, out)?;
    pipeline::write_provenance(records, out)?;
    report(&RunSummary::from_records(records));
    Ok(())
}

fn report(summary: &RunSummary) {
    println!("{summary}");
    for f in &summary.failures {
        eprintln!("warning: {f}");
    }
}

fn cmd_sgram(a: SgramArgs) -> CliResult {
    let d = SgramConfig::default();
    let cfg = SgramConfig {
        window_len: a.win.map_or(d.window_len, |v| v as usize),
        hop: a.hop.map_or(d.hop, |v| v as usize),
        fft_size: a.fft.map_or(d.fft_size, |v| v as usize),
        dynrange_db: a.dynrange.unwrap_or(d.dynrange_db),
    };
    cfg.check().map_err(|e| {
        let flag = match e {
            DspError::Geometry(m) if m.contains("dynamic") => "--dynrange",
            _ => "--win/--hop/--fft",
        };
        Failure::new(2, format!("{flag}: {e}"))
    })?;
    let clip = read_wav(&a.input).map_err(|e| Failure::new(if e.is_io() { 1 } else { 3 }, format!("{}: {e}", a.input.display())))?;
    let spec = sgram(&clip, &cfg).map_err(|e| Failure::new(3, format!("{}: {e}", a.input.display())))?;
    let is_raw = a.out.extension().is_some_and(|e| e.eq_ignore_ascii_case("agms"));
    let format = match a.format.unwrap_or(if is_raw { Format::Raw } else { Format::Png }) {
        Format::Png => ImageFormat::Png,
        Format::Raw => ImageFormat::Raw,
    };
    export_spectrogram(&spec, &a.out, format).map_err(PipelineError::from)?;
    println!("{}x{} peak {:.2} dB", spec.bins, spec.frames, spec.peak());
    Ok(())
}

fn cmd_augment_audio(a: AugmentArgs) -> CliResult {
    let cfg = resolve_config(&a.common, Some(a.include_original))?;
    if cfg.audio_count() == 0 && !cfg.include_original {
        return Err(PipelineError::NoOps.into());
    }
    let manifest = load_manifest(&a.manifest).map_err(manifest_failure)?;
    prepare_out(&a.common.out, a.common.force)?;
    let records = pipeline::augment_from_audio(&manifest, &cfg, &a.common.out)?;
    finish(&records, &a.common.out)
}

/// Manifest for DIR/<label>/*.agms, sorted by label then file name.
fn raw_dir_manifest(dir: &Path) -> Result<DatasetManifest, Failure> {
    let io = |e: std::io::Error| Failure::new(1, format!("{}: {e}", dir.display()));
    let mut entries = Vec::new();
    let mut labels: Vec<_> = std::fs::read_dir(dir).map_err(io)?.collect::<Result<_, _>>().map_err(io)?;
    labels.retain(|d| d.path().is_dir());
    labels.sort_by_key(|d| d.file_name());
    for l in labels {
        let label = l.file_name().to_string_lossy().into_owned();
        let mut files: Vec<_> = std::fs::read_dir(l.path()).map_err(io)?.collect::<Result<_, _>>().map_err(io)?;
        files.retain(|f| f.path().extension().is_some_and(|e| e.eq_ignore_ascii_case("agms")));
        files.sort_by_key(|f| f.file_name());
        for f in files {
            entries.push(ManifestEntry {
                path: f.path(),
                source: format!("{label}/{}", f.file_name().to_string_lossy()),
                label: label.clone(),
            });
        }
    }
    if entries.is_empty() {
        return Err(Failure::new(3, format!("{}: no <label>/*.agms files", dir.display())));
    }
    Ok(DatasetManifest { entries })
}

fn cmd_augment_spec(a: AugmentSpecArgs) -> CliResult {
    let cfg = resolve_config(&a.common, None)?;
    if cfg.spec_count() == 0 {
        return Err(PipelineError::NoOps.into());
    }
    let manifest = match (&a.manifest, &a.raw_dir) {
        (Some(m), _) => load_manifest(m).map_err(manifest_failure)?,
        (None, Some(d)) => raw_dir_manifest(d)?,
        (None, None) => return Err(Failure::new(2, "one of --manifest or --raw-dir is required")),
    };
    prepare_out(&a.common.out, a.common.force)?;
    let records = pipeline::augment_from_spectrogram(&manifest, &cfg, &a.common.out)?;
    finish(&records, &a.common.out)
}

fn cmd_run(a: RunArgs) -> CliResult {
    let cfg = resolve_config(&a.common, Some(a.include_original))?;
    let manifest = load_manifest(&a.manifest).map_err(manifest_failure)?;
    prepare_out(&a.common.out, a.common.force)?;
    let run = pipeline::run_full(&manifest, &cfg, &a.common.out)?;
    report(&run.summary);
    Ok(())
}

fn cmd_demo(a: DemoArgs) -> CliResult {
    let seed = match a.seed {
        Some(s) => s,
        None => env_seed()?.unwrap_or(demo::DEMO_SEED),
    };
    prepare_out(&a.out, true)?;
    let r = demo::run_demo(&a.out, seed)?;
    report(&r.report.summary);
    println!("{} ({} tiles)", r.audio_sheet.display(), r.audio_tiles);
    println!("{} ({} tiles)", r.spec_sheet.display(), r.spec_tiles);
    Ok(())
}

fn cmd_config(a: ConfigArgs) -> CliResult {
    if a.defaults {
        println!("{}", PipelineConfig::default().to_json());
    } else {
        print!("{}", config_doc());
    }
    Ok(())
}

fn fail(f: Failure) -> ExitCode {
    let line = f.message.replace(['\n', '\r'], " ");
    eprintln!("error[{}]: {line}", f.code);
    ExitCode::from(f.exit)
}

fn main() -> ExitCode {
    let mut argv: Vec<String> = std::env::args().collect();
    // `--help config` is an alias for `help config`
    if let Some(pos) = argv.iter().position(|a| a == "--help") {
        if argv.get(pos + 1).map(String::as_str) == Some("config") {
            argv.splice(pos..pos + 2, ["help".to_owned(), "config".to_owned()]);
        }
    }
    let cmd = Cli::command().after_help(method_help());
    let cli = match cmd.try_get_matches_from(argv).and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            return fail(Failure {
                code: "flags",
                exit: 2,
                message: first.trim_start_matches("error: ").to_owned(),
            });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            return fail(Failure::new(2, format!("--threads: {e}")));
        }
    }
    let result = match cli.command {
        Command::Sgram(a) => cmd_sgram(a),
        Command::AugmentAudio(a) => cmd_augment_audio(a),
        Command::AugmentSpec(a) => cmd_augment_spec(a),
        Command::Run(a) => cmd_run(a),
        Command::Demo(a) => cmd_demo(a),
        Command::Config(a) => cmd_config(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => fail(f),
    }
}
