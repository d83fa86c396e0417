#![no_main]

use augkit::audio_io::{decode_wav, encode_wav, WavCodec, WavEncoding};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(clip) = decode_wav(data) {
        clip.validate().expect("decoded clips are valid");
        // float32 re-encoding must survive a second decode
        let bytes = encode_wav(&clip, WavEncoding::for_clip(&clip, WavCodec::Float32)).unwrap();
        let again = decode_wav(&bytes).unwrap();
        assert_eq!(again.len(), clip.len());
    }
});
