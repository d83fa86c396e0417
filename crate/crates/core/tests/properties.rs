use augkit::audio_aug::{apply_gain, time_shift};
use augkit::audio_io::{decode_wav, encode_wav, WavCodec, WavEncoding};
use augkit::dsp::{istft, stft_samples, StftGeometry};
use augkit::pipeline::{decode_raw, encode_raw, spectrogram_image};
use augkit::spec_aug::{freq_mask, spec_freq_shift, spec_time_shift, time_mask, VtlnMap};
use augkit::{derive_stream, AudioClip, Spectrogram, Tag};
use proptest::prelude::*;

fn spec_strategy() -> impl Strategy<Value = Spectrogram> {
    (1usize..12, 1usize..12, -120.0f64..0.0, 1.0f64..80.0).prop_flat_map(|(bins, frames, floor, range)| {
        prop::collection::vec(0.0f64..=1.0, bins * frames).prop_map(move |u| Spectrogram {
            values: u.iter().map(|v| floor + v * range).collect(),
            bins,
            frames,
            sample_rate: 16000,
            window_len: 512,
            hop: 128,
            dyn_floor: floor,
            label: Some("x".into()),
        })
    })
}

fn assert_spec_invariants(src: &Spectrogram, out: &Spectrogram) {
    assert_eq!((out.bins, out.frames), (src.bins, src.frames));
    assert_eq!(out.sample_rate, src.sample_rate);
    assert_eq!(out.label, src.label);
    out.validate().unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stft_round_trip(
        x in prop::collection::vec(-1.0f64..1.0, 0..3000),
        win_pow in 4u32..10,
        hop_div in prop::sample::select(vec![2usize, 4, 8]),
    ) {
        let window_len = 1usize << win_pow;
        let g = StftGeometry::new(window_len, window_len / hop_div, window_len).unwrap();
        let y = istft(&stft_samples(&x, g, 8000).unwrap());
        prop_assert_eq!(y.channels[0].len(), x.len());
        for (a, b) in x.iter().zip(&y.channels[0]) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn raw_round_trip_is_bitwise(s in spec_strategy()) {
        let mut back = decode_raw(&encode_raw(&s)).unwrap();
        back.label = s.label.clone();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn image_is_flipped_and_in_range(s in spec_strategy()) {
        let img = spectrogram_image(&s);
        prop_assert_eq!(img.pixels.len(), s.bins * s.frames);
        let peak = s.peak();
        for r in 0..s.bins {
            for c in 0..s.frames {
                let p = img.pixels[(s.bins - 1 - r) * s.frames + c];
                let want = if peak > s.dyn_floor {
                    (255.0 * (s.get(r, c) - s.dyn_floor) / (peak - s.dyn_floor)).round() as u8
                } else {
                    0
                };
                prop_assert_eq!(p, want);
            }
        }
    }

    #[test]
    fn float32_wav_round_trip(
        ch in 1usize..4,
        raw in prop::collection::vec(-1.5f32..1.5, 1..400),
        rate in 1u32..200_000,
    ) {
        let channels: Vec<Vec<f64>> = (0..ch)
            .map(|c| raw.iter().map(|v| (*v * (c + 1) as f32) as f64).collect())
            .collect();
        let clip = AudioClip::new(channels, rate);
        let bytes = encode_wav(&clip, WavEncoding::for_clip(&clip, WavCodec::Float32)).unwrap();
        let back = decode_wav(&bytes).unwrap();
        prop_assert_eq!(back.sample_rate, rate);
        prop_assert_eq!(back.channels, clip.channels);
    }

    #[test]
    fn pcm16_error_bound(raw in prop::collection::vec(-1.0f64..=1.0, 1..400)) {
        let clip = AudioClip::mono(raw, 8000);
        let bytes = encode_wav(&clip, WavEncoding::for_clip(&clip, WavCodec::Pcm16)).unwrap();
        let back = decode_wav(&bytes).unwrap();
        for (a, b) in back.channels[0].iter().zip(&clip.channels[0]) {
            prop_assert!((a - b).abs() <= 1.0 / 32768.0);
        }
    }

    #[test]
    fn gains_compose(x in prop::collection::vec(-1.0f64..1.0, 1..200), a in -40.0f64..40.0, b in -40.0f64..40.0) {
        let clip = AudioClip::mono(x, 8000);
        let two = apply_gain(&apply_gain(&clip, a).unwrap(), b).unwrap();
        let one = apply_gain(&clip, a + b).unwrap();
        for (p, q) in two.channels[0].iter().zip(&one.channels[0]) {
            prop_assert!((p - q).abs() <= 1e-12 * (1.0 + q.abs()) * 1e3);
        }
    }

    #[test]
    fn circular_shift_permutes(x in prop::collection::vec(-1.0f64..1.0, 1..300), f in 0.0f64..1.0) {
        let clip = AudioClip::mono(x.clone(), 8000);
        let y = time_shift(&clip, f, true).unwrap();
        let mut a = x;
        let mut b = y.channels[0].clone();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn delay_shift_prefixes_zeros(x in prop::collection::vec(-1.0f64..1.0, 1..300), f in 0.0f64..1.0) {
        let clip = AudioClip::mono(x.clone(), 8000);
        let y = &time_shift(&clip, f, false).unwrap().channels[0];
        prop_assert_eq!(y.len(), x.len());
        let d = y.iter().take_while(|v| **v == 0.0).count().min(x.len());
        let lead = x.iter().take_while(|v| **v == 0.0).count();
        let delay = d.saturating_sub(lead);
        prop_assert_eq!(&y[delay..], &x[..x.len() - delay]);
    }

    #[test]
    fn spec_shifts_keep_invariants(s in spec_strategy(), cols in -20i64..20, rows in -20i64..20, circ: bool) {
        let t = spec_time_shift(&s, cols, circ);
        let f = spec_freq_shift(&s, rows);
        if let Ok(t) = t {
            assert_spec_invariants(&s, &t);
            if circ {
                let mut a = s.values.clone();
                let mut b = t.values.clone();
                a.sort_by(f64::total_cmp);
                b.sort_by(f64::total_cmp);
                prop_assert_eq!(a, b);
            }
        }
        if let Ok(f) = f {
            assert_spec_invariants(&s, &f);
        }
    }

    #[test]
    fn masks_touch_only_their_band(s in spec_strategy(), max in 0usize..12, seed: u64) {
        let mut rng = derive_stream(seed, ["mask"]);
        if let Ok((out, m)) = freq_mask(&s, max.min(s.bins.saturating_sub(1)), &mut rng) {
            assert_spec_invariants(&s, &out);
            prop_assert!(m.width <= max && m.start + m.width <= s.bins);
            for r in 0..s.bins {
                let inside = (m.start..m.start + m.width).contains(&r);
                for c in 0..s.frames {
                    prop_assert_eq!(out.get(r, c), if inside { s.dyn_floor } else { s.get(r, c) });
                }
            }
        }
        if let Ok((out, m)) = time_mask(&s, max.min(s.frames.saturating_sub(1)), &mut rng) {
            prop_assert!(m.start + m.width <= s.frames);
            for r in 0..s.bins {
                for c in 0..s.frames {
                    let inside = (m.start..m.start + m.width).contains(&c);
                    prop_assert_eq!(out.get(r, c), if inside { s.dyn_floor } else { s.get(r, c) });
                }
            }
        }
    }

    #[test]
    fn vtln_map_is_monotone_and_invertible(alpha in 0.8f64..1.2, bins in 2usize..1025, u in 0.0f64..1.0) {
        let m = VtlnMap::new(alpha, bins);
        let f = u * (bins - 1) as f64;
        prop_assert!((m.inverse(m.forward(f)) - f).abs() < 1e-9);
        prop_assert!(m.forward(f + 0.5) >= m.forward(f));
        prop_assert!((m.forward((bins - 1) as f64) - (bins - 1) as f64).abs() < 1e-9);
        prop_assert!(m.forward(0.0).abs() < 1e-12);
    }

    #[test]
    fn streams_are_reproducible(seed: u64, a in 0u64..1000, b in 0u64..1000) {
        let mut x = derive_stream(seed, [Tag::from(a), "audio".into(), Tag::from(b)]);
        let mut y = derive_stream(seed, [Tag::from(a), "audio".into(), Tag::from(b)]);
        for _ in 0..16 {
            let u = x.uniform();
            prop_assert!((0.0..1.0).contains(&u));
            prop_assert_eq!(u.to_bits(), y.uniform().to_bits());
        }
        let mut z = derive_stream(seed, [Tag::from(a), "spec".into(), Tag::from(b)]);
        let mut w = derive_stream(seed, [Tag::from(a), "audio".into(), Tag::from(b)]);
        prop_assert_ne!(z.next_u64(), w.next_u64());
    }
}
