#![no_main]

use augkit::audio_io::parse_manifest;
use libfuzzer_sys::fuzz_target;
use std::path::Path;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(m) = parse_manifest(text, Path::new("/base")) {
            assert!(!m.is_empty());
            for e in &m.entries {
                assert!(!e.label.is_empty() && !e.source.is_empty());
            }
        }
    }
});
