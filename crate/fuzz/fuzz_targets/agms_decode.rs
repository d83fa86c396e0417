#![no_main]

use augkit::pipeline::{decode_raw, encode_raw};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(spec) = decode_raw(data) {
        assert_eq!(encode_raw(&spec), data);
    }
});
