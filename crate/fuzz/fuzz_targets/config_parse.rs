#![no_main]

use augkit::pipeline::PipelineConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = PipelineConfig::from_json(text) {
            let back = PipelineConfig::from_json(&cfg.to_json()).expect("round trip");
            assert_eq!(back, cfg);
        }
    }
});
