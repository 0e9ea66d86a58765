use nsgf::adapt::{detect_onsets, OnsetParams};
use nsgf::signal_io::{generate, load_wav, write_wav, Signal, SyntheticKind, SyntheticSpec, Tone};
use nsgf::{fft, Complex64, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn write_raw(path: &std::path::Path, channels: u16, bits: u16, samples: &[i32]) {
    let spec = hound::WavSpec {
        channels,
        sample_rate: 22050,
        bits_per_sample: bits,
        sample_format: hound::SampleFormat::Int,
    };
    let mut w = hound::WavWriter::create(path, spec).unwrap();
    for &s in samples {
        w.write_sample(s).unwrap();
    }
    w.finalize().unwrap();
}

fn read_raw(path: &std::path::Path) -> Vec<i16> {
    hound::WavReader::open(path)
        .unwrap()
        .into_samples::<i16>()
        .map(Result::unwrap)
        .collect()
}

#[test]
fn max_positive_sample_scales_below_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.wav");
    write_raw(&path, 1, 16, &[0x7FFF]);
    let s = load_wav(&path).unwrap();
    assert_eq!(s.samples(), &[32767.0 / 32768.0]);
    assert_eq!(s.sample_rate(), 22050);
}

#[test]
fn stereo_keeps_first_channel() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("stereo.wav");
    write_raw(&path, 2, 16, &[100, -7, 200, -7, -300, -7]);
    let s = load_wav(&path).unwrap();
    let want: Vec<f64> = [100.0, 200.0, -300.0].iter().map(|v| v / 32768.0).collect();
    assert_eq!(s.samples(), want.as_slice());
}

#[test]
fn reads_24_bit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("deep.wav");
    write_raw(&path, 1, 24, &[-(1 << 23), 1 << 22]);
    let s = load_wav(&path).unwrap();
    assert_eq!(s.samples(), &[-1.0, 0.5]);
}

#[test]
fn rejects_float_and_garbage() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("float.wav");
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: 8000,
        bits_per_sample: 32,
        sample_format: hound::SampleFormat::Float,
    };
    let mut w = hound::WavWriter::create(&path, spec).unwrap();
    w.write_sample(0.5f32).unwrap();
    w.finalize().unwrap();
    assert!(matches!(load_wav(&path), Err(Error::Unsupported(_))));

    let junk = dir.path().join("junk.wav");
    std::fs::write(&junk, b"RIFX not a wave file").unwrap();
    assert!(matches!(load_wav(&junk), Err(Error::Format(_))));
    assert!(matches!(load_wav(dir.path().join("missing.wav")), Err(Error::Io(_))));
}

#[test]
fn random_16_bit_round_trip_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.wav");
    let again = dir.path().join("b.wav");
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let raw: Vec<i32> = (0..5000).map(|_| rng.gen_range(-32768..=32767)).collect();
    write_raw(&path, 1, 16, &raw);
    let s = load_wav(&path).unwrap();
    write_wav(&s, &again).unwrap();
    let back: Vec<i32> = read_raw(&again).into_iter().map(i32::from).collect();
    assert_eq!(back, raw);
}

#[test]
fn write_boundaries_and_quantization() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.wav");
    write_wav(&Signal::new(vec![-1.0, 0.0, 1.0], 8000).unwrap(), &path).unwrap();
    assert_eq!(read_raw(&path), vec![i16::MIN, 0, i16::MAX]);

    write_wav(&Signal::new(vec![0.0; 100], 8000).unwrap(), &path).unwrap();
    assert_eq!(read_raw(&path), vec![0; 100]);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s = Signal::new((0..4000).map(|_| rng.gen_range(-0.99..0.99)).collect(), 8000).unwrap();
    write_wav(&s, &path).unwrap();
    let back = load_wav(&path).unwrap();
    let dev = s
        .samples()
        .iter()
        .zip(back.samples())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(dev <= 2f64.powi(-15));
}

#[test]
fn unwritable_path_is_io_error() {
    let s = Signal::new(vec![0.0; 4], 8000).unwrap();
    let err = write_wav(&s, "/nonexistent-dir/x.wav").unwrap_err();
    assert!(matches!(err, Error::Io(_)));
}

#[test]
fn single_tone_spectrum_peaks_at_fundamental() {
    let sr = 44100;
    let spec = SyntheticSpec {
        length: sr as usize,
        sample_rate: sr,
        kind: SyntheticKind::ToneMelody {
            tones: vec![Tone {
                fundamental: 87.0,
                onset: 0,
                amplitude: 0.1,
            }],
            harmonics: 8,
            decay_seconds: 1.5,
        },
    };
    let f = generate(&spec).unwrap();
    // 44100 = 2²·3²·5²·7², so a one-second DFT has 1 Hz bins
    let mut buf: Vec<Complex64> = f.samples().iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft::forward(buf.len()).process(&mut buf);
    let peak = (1..buf.len() / 2)
        .max_by(|&a, &b| buf[a].norm().total_cmp(&buf[b].norm()))
        .unwrap();
    assert_eq!(peak, 87);
}

#[test]
fn generation_is_pure() {
    let spec = SyntheticSpec::melody(1 << 14, 44100);
    assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
    let noise = SyntheticSpec::white_noise(1000, 8000, 42);
    assert_eq!(generate(&noise).unwrap(), generate(&noise).unwrap());
}

#[test]
fn click_onsets_within_one_hop() {
    let spec = SyntheticSpec {
        length: 65_536,
        sample_rate: 44100,
        kind: SyntheticKind::ClickTrain {
            positions: vec![10_000, 30_000, 50_000],
            amplitude: 1.0,
        },
    };
    let params = OnsetParams::default();
    let found = detect_onsets(&generate(&spec).unwrap(), &params).unwrap();
    assert_eq!(found.len(), 3, "{found:?}");
    for (got, want) in found.iter().zip(spec.event_positions()) {
        assert!(got.abs_diff(want) <= params.stft_hop, "{got} vs {want}");
    }
}

#[test]
fn melody_has_exactly_its_ten_onsets() {
    let spec = SyntheticSpec::melody(1 << 18, 44100);
    let f = generate(&spec).unwrap();
    let found = detect_onsets(&f, &OnsetParams::default()).unwrap();
    let truth = spec.event_positions();
    assert_eq!(found.len(), 10, "{found:?}");
    for (got, want) in found.iter().zip(&truth) {
        assert!(got.abs_diff(*want) <= 1024, "{got} vs {want}");
    }
    assert_eq!(found, detect_onsets(&f.scaled(10.0).unwrap(), &OnsetParams::default()).unwrap());
}
