use std::path::Path;
use std::process::{Command, Output};

fn augkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_augkit"))
        .args(args)
        .env_remove("AGM_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn assert_error(o: &Output, code: i32, needle: &str) {
    assert_eq!(o.status.code(), Some(code), "stderr: {}", stderr(o));
    let err = stderr(o);
    assert!(err.starts_with("error["), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(err.contains(needle), "{err} lacks {needle}");
}

/// Builds the six demo clips under `dir/demo/input`.
fn demo_inputs(dir: &Path) -> String {
    let out = dir.join("demo");
    let o = augkit(&["demo", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    out.join("input/manifest.csv").to_string_lossy().into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn sgram_reports_shape_and_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = demo_inputs(tmp.path());
    let wav = Path::new(&manifest).with_file_name("tone_a4.wav");
    let png = tmp.path().join("s.png");
    let o = augkit(&["sgram", "--in", p(&wav), "--out", p(&png)]);
    assert!(o.status.success());
    // 2 s at 44100 Hz: ceil((88200 + 1536 - 1024) / 256) + 1 frames
    assert!(stdout(&o).starts_with("513x348 peak"), "{}", stdout(&o));
    let bytes = std::fs::read(&png).unwrap();
    assert_eq!(u32::from_be_bytes(bytes[16..20].try_into().unwrap()), 348);
    assert_eq!(u32::from_be_bytes(bytes[20..24].try_into().unwrap()), 513);

    let raw = tmp.path().join("s.agms");
    assert!(augkit(&["sgram", "--in", p(&wav), "--out", p(&raw), "--win", "512", "--hop", "128", "--fft", "512"]).status.success());
    assert_eq!(&std::fs::read(&raw).unwrap()[..4], b"AGMS");

    assert_error(&augkit(&["sgram", "--in", p(&wav), "--out", p(&png), "--win", "0"]), 2, "--win");
    assert_error(&augkit(&["sgram", "--in", "nope.wav", "--out", p(&png)]), 1, "nope.wav");
    assert_error(&augkit(&["sgram", "--in", p(&wav), "--out", p(&png), "--hop", "2048"]), 2, "hop");

    let short = tmp.path().join("short.wav");
    let mut b = std::fs::read(&wav).unwrap();
    // keep the 44-byte canonical header plus 100 float samples
    b.truncate(44 + 400);
    b[40..44].copy_from_slice(&400u32.to_le_bytes());
    b[4..8].copy_from_slice(&(36u32 + 400).to_le_bytes());
    std::fs::write(&short, b).unwrap();
    assert_error(&augkit(&["sgram", "--in", p(&short), "--out", p(&png)]), 3, "too short");
}

#[test]
fn augment_audio_summary_and_skip_policy() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = demo_inputs(tmp.path());
    let out = tmp.path().join("a");
    let o = augkit(&["augment-audio", "--manifest", &manifest, "--out", p(&out), "--seed", "1"]);
    assert!(stdout(&o).contains("66 AugSA outputs"), "{}", stdout(&o));
    assert!(out.join("augmented.csv").is_file() && out.join("provenance.json").is_file());

    let broken = Path::new(&manifest).with_file_name("broken.csv");
    let mut text = std::fs::read_to_string(&manifest).unwrap();
    text.push_str("no_such_file.wav,chirp\n");
    std::fs::write(&broken, text).unwrap();
    let o = augkit(&["augment-audio", "--manifest", p(&broken), "--out", p(&tmp.path().join("b"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("66 AugSA outputs") && stdout(&o).contains("1 failed"), "{}", stdout(&o));
    assert!(stderr(&o).contains("no_such_file.wav"));
}

#[test]
fn emit_controls_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = demo_inputs(tmp.path());
    let out = tmp.path().join("e");
    let o = augkit(&["augment-audio", "--manifest", &manifest, "--out", p(&out), "--emit", "raw,wav"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let count = |dir: &str, ext: &str| {
        std::fs::read_dir(out.join(dir))
            .map(|d| d.filter(|e| e.as_ref().unwrap().path().extension().unwrap() == ext).count())
            .unwrap_or(0)
    };
    assert_eq!((count("images", "agms"), count("images", "png"), count("audio", "wav")), (66, 0, 66));
    assert_error(
        &augkit(&["augment-audio", "--manifest", &manifest, "--out", p(&tmp.path().join("x")), "--emit", "jpg"]),
        2,
        "--emit",
    );
}

#[test]
fn augment_spec_inputs_and_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = demo_inputs(tmp.path());
    let o = augkit(&["augment-spec", "--manifest", &manifest, "--out", p(&tmp.path().join("s"))]);
    assert!(stdout(&o).contains("42 AugSS outputs"), "{}", stdout(&o));

    let cfg = tmp.path().join("nospec.json");
    std::fs::write(&cfg, r#"{"spec_ops": [{"method": "vtln", "enabled": false}]}"#).unwrap();
    let o = augkit(&["augment-spec", "--manifest", &manifest, "--out", p(&tmp.path().join("n")), "--config", p(&cfg)]);
    assert_error(&o, 2, "no ops enabled");

    // DIR/<label>/*.agms
    let raw_dir = tmp.path().join("raw");
    let input = Path::new(&manifest).parent().unwrap().to_owned();
    for (i, (name, label)) in [("chirp_up", "chirp"), ("chirp_down", "chirp"), ("tone_a4", "tone")].iter().enumerate() {
        std::fs::create_dir_all(raw_dir.join(label)).unwrap();
        let out = raw_dir.join(label).join(format!("{i}_{name}.agms"));
        let wav = input.join(format!("{name}.wav"));
        assert!(augkit(&["sgram", "--in", p(&wav), "--out", p(&out)]).status.success());
    }
    let o = augkit(&["augment-spec", "--raw-dir", p(&raw_dir), "--out", p(&tmp.path().join("r"))]);
    assert!(o.status.success(), "{}", stderr(&o));
    // tone has no partner, so its emda output is flagged
    assert!(stdout(&o).contains("20 AugSS outputs") && stdout(&o).contains("1 failed"), "{}", stdout(&o));

    let bad = raw_dir.join("tone/2_tone_a4.agms");
    let mut b = std::fs::read(&bad).unwrap();
    b[..4].copy_from_slice(b"JUNK");
    std::fs::write(&bad, b).unwrap();
    let o = augkit(&["augment-spec", "--raw-dir", p(&raw_dir), "--out", p(&tmp.path().join("r2"))]);
    assert_error(&o, 3, "2_tone_a4.agms");
}

#[test]
fn run_refuses_reuse_and_validates_config() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = demo_inputs(tmp.path());
    let out = tmp.path().join("run");
    let args = ["run", "--manifest", &manifest, "--out", p(&out), "--seed", "42"];
    let o = augkit(&args);
    assert!(stdout(&o).contains("66 AugSA outputs, 42 AugSS outputs"), "{}", stdout(&o));
    assert_error(&augkit(&args), 2, "--force");
    let mut forced = args.to_vec();
    forced.push("--force");
    assert!(augkit(&forced).status.success());

    let cfg = tmp.path().join("bad.json");
    std::fs::write(&cfg, r#"{"audio_ops": [{"method": "flanger"}]}"#).unwrap();
    let o = augkit(&["run", "--manifest", &manifest, "--out", p(&tmp.path().join("x")), "--config", p(&cfg)]);
    assert_error(&o, 2, "valid methods: pitch_shift");
    assert!(stderr(&o).contains("tps_warp"));

    std::fs::write(tmp.path().join("bad.csv"), "file,class\n").unwrap();
    let o = augkit(&["run", "--manifest", p(&tmp.path().join("bad.csv")), "--out", p(&tmp.path().join("y"))]);
    assert_error(&o, 3, "header");
    let o = augkit(&["run", "--manifest", p(&tmp.path().join("none.csv")), "--out", p(&tmp.path().join("z"))]);
    assert_error(&o, 1, "none.csv");
}

#[test]
fn seed_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = demo_inputs(tmp.path());
    let prov = |name: &str, seed_flag: Option<&str>, env: Option<&str>, cfg: Option<&str>| {
        let out = tmp.path().join(name);
        let mut c = Command::new(env!("CARGO_BIN_EXE_augkit"));
        c.args(["augment-spec", "--manifest", &manifest, "--out", p(&out)]);
        c.env_remove("AGM_SEED");
        if let Some(s) = seed_flag {
            c.args(["--seed", s]);
        }
        if let Some(e) = env {
            c.env("AGM_SEED", e);
        }
        if let Some(json) = cfg {
            let path = tmp.path().join(format!("{name}.json"));
            std::fs::write(&path, json).unwrap();
            c.arg("--config").arg(&path);
        }
        assert!(c.output().unwrap().status.success());
        let text = std::fs::read_to_string(out.join("provenance.json")).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v[0]["seed"].as_u64().unwrap()
    };
    assert_eq!(prov("d", None, None, None), 0);
    assert_eq!(prov("e", None, Some("17"), None), 17);
    assert_eq!(prov("c", None, Some("17"), Some(r#"{"seed": 5}"#)), 5);
    assert_eq!(prov("f", Some("9"), Some("17"), Some(r#"{"seed": 5}"#)), 9);
}

#[test]
fn help_lists_registry_and_config_schema() {
    let o = augkit(&["--help"]);
    assert!(o.status.success());
    for m in augkit::Method::ALL {
        assert!(stdout(&o).contains(m.name()), "{}", m.name());
    }
    let o = augkit(&["--help", "config"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("include_original") && text.contains("delay_cols") && text.contains("sigma_fraction"));
    let o = augkit(&["config", "--defaults"]);
    let cfg = augkit::pipeline::PipelineConfig::from_json(&stdout(&o)).unwrap();
    assert_eq!(cfg, augkit::pipeline::PipelineConfig::default());
}
