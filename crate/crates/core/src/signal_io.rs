//! Signals, WAV input/output and deterministic synthetic test signals.
//!
//! Multichannel WAV files are reduced to their **first channel**; every other
//! channel is discarded without mixing.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite, real, sampled waveform.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl Signal {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Parameter("signal must contain at least one sample".into()));
        }
        if sample_rate == 0 {
            return Err(Error::Parameter("sample rate must be positive".into()));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::Parameter(format!("sample {i} is not finite")));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.samples.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// First `len` samples.
    pub fn truncated(&self, len: usize) -> Result<Self> {
        if len == 0 || len > self.len() {
            return Err(Error::Parameter(format!(
                "cannot truncate a signal of length {} to {len}",
                self.len()
            )));
        }
        Signal::new(self.samples[..len].to_vec(), self.sample_rate)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Signal::new(
            self.samples.iter().map(|x| x * factor).collect(),
            self.sample_rate,
        )
    }
}

/// Reads a PCM WAV file (16- or 24-bit integer). Only channel 0 is kept.
pub fn load_wav(path: impl AsRef<Path>) -> Result<Signal> {
    let reader = hound::WavReader::open(path.as_ref())?;
    let spec = reader.spec();
    if spec.sample_format != hound::SampleFormat::Int {
        return Err(Error::Unsupported("floating-point samples".into()));
    }
    if spec.bits_per_sample != 16 && spec.bits_per_sample != 24 {
        return Err(Error::Unsupported(format!(
            "{}-bit samples",
            spec.bits_per_sample
        )));
    }
    let channels = spec.channels.max(1) as usize;
    let scale = (1_i64 << (spec.bits_per_sample - 1)) as f64;
    let mut samples = Vec::with_capacity(reader.len() as usize / channels);
    for (i, s) in reader.into_samples::<i32>().enumerate() {
        let s = s?;
        if i % channels == 0 {
            samples.push(s as f64 / scale);
        }
    }
    if samples.is_empty() {
        return Err(Error::Format("file contains no samples".into()));
    }
    Signal::new(samples, spec.sample_rate)
}

/// Quantizes one sample to 16-bit PCM, clamping to [-1, 1].
pub fn quantize_i16(x: f64) -> i16 {
    let scaled = (x.clamp(-1.0, 1.0) * 32768.0).round();
    scaled.clamp(i16::MIN as f64, i16::MAX as f64) as i16
}

/// Writes 16-bit PCM mono.
pub fn write_wav(signal: &Signal, path: impl AsRef<Path>) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: signal.sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path.as_ref(), spec)?;
    for &x in &signal.samples {
        writer.write_sample(quantize_i16(x))?;
    }
    writer.finalize()?;
    Ok(())
}

fn default_harmonics() -> usize {
    8
}

fn default_decay() -> f64 {
    1.5
}

fn default_tone_amplitude() -> f64 {
    0.1
}

fn default_unit() -> f64 {
    1.0
}

fn default_noise_amplitude() -> f64 {
    0.5
}

fn default_atom_length() -> usize {
    1024
}

/// One tone of a synthetic melody.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tone {
    /// Fundamental frequency in Hz.
    pub fundamental: f64,
    /// First sample of the tone.
    pub onset: usize,
    #[serde(default = "default_tone_amplitude")]
    pub amplitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SyntheticKind {
    /// Sum of exponentially decaying harmonic tones; harmonic `h` has
    /// relative amplitude `1/h`.
    ToneMelody {
        tones: Vec<Tone>,
        #[serde(default = "default_harmonics")]
        harmonics: usize,
        /// Exponential decay time constant in seconds.
        #[serde(default = "default_decay")]
        decay_seconds: f64,
    },
    ClickTrain {
        positions: Vec<usize>,
        #[serde(default = "default_unit")]
        amplitude: f64,
    },
    /// Uniform noise in `[-amplitude, amplitude)`.
    WhiteNoise {
        seed: u64,
        #[serde(default = "default_noise_amplitude")]
        amplitude: f64,
    },
    /// Hann-windowed cosine atoms at random places and frequencies with
    /// amplitudes `amplitude·k^(-exponent)`, `k = 1..=atoms`.
    PowerLawCoeffSignal {
        seed: u64,
        exponent: f64,
        atoms: usize,
        #[serde(default = "default_atom_length")]
        atom_length: usize,
        #[serde(default = "default_noise_amplitude")]
        amplitude: f64,
    },
}

/// Serializable description of a synthetic test signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub length: usize,
    pub sample_rate: u32,
    #[serde(flatten)]
    pub kind: SyntheticKind,
}

/// MIDI note numbers of an ascending F major arpeggio from F2 to F5.
const F_MAJOR_MIDI: [i32; 10] = [41, 45, 48, 53, 57, 60, 65, 69, 72, 77];

pub fn midi_to_hz(note: i32) -> f64 {
    440.0 * 2f64.powf((note - 69) as f64 / 12.0)
}

impl SyntheticSpec {
    /// Ten-tone ascending F major melody (87 Hz to 698 Hz), tones evenly
    /// spaced with the first onset at `length/20`.
    pub fn melody(length: usize, sample_rate: u32) -> Self {
        let tones = F_MAJOR_MIDI
            .iter()
            .enumerate()
            .map(|(k, &note)| Tone {
                fundamental: midi_to_hz(note),
                onset: length / 20 + k * length / 10,
                amplitude: default_tone_amplitude(),
            })
            .collect();
        Self {
            length,
            sample_rate,
            kind: SyntheticKind::ToneMelody {
                tones,
                harmonics: default_harmonics(),
                decay_seconds: default_decay(),
            },
        }
    }

    pub fn white_noise(length: usize, sample_rate: u32, seed: u64) -> Self {
        Self {
            length,
            sample_rate,
            kind: SyntheticKind::WhiteNoise {
                seed,
                amplitude: default_noise_amplitude(),
            },
        }
    }

    /// Onsets of the tones (melody) or clicks, if any.
    pub fn event_positions(&self) -> Vec<usize> {
        match &self.kind {
            SyntheticKind::ToneMelody { tones, .. } => tones.iter().map(|t| t.onset).collect(),
            SyntheticKind::ClickTrain { positions, .. } => positions.clone(),
            _ => Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.length == 0 {
            return Err(Error::Parameter("synthetic length must be positive".into()));
        }
        if self.sample_rate == 0 {
            return Err(Error::Parameter("sample rate must be positive".into()));
        }
        let nyquist = self.sample_rate as f64 / 2.0;
        match &self.kind {
            SyntheticKind::ToneMelody {
                tones,
                harmonics,
                decay_seconds,
            } => {
                if *harmonics == 0 {
                    return Err(Error::Parameter("at least one harmonic required".into()));
                }
                if !(*decay_seconds > 0.0) {
                    return Err(Error::Parameter("decay constant must be positive".into()));
                }
                for t in tones {
                    if !(t.fundamental > 0.0 && t.fundamental < nyquist) {
                        return Err(Error::Parameter(format!(
                            "fundamental {} Hz outside (0, {nyquist}) Hz",
                            t.fundamental
                        )));
                    }
                    if t.onset >= self.length {
                        return Err(Error::Parameter(format!(
                            "tone onset {} beyond signal length {}",
                            t.onset, self.length
                        )));
                    }
                }
            }
            SyntheticKind::ClickTrain { positions, .. } => {
                if positions.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Parameter(
                        "click positions must be strictly increasing".into(),
                    ));
                }
                if positions.last().is_some_and(|&p| p >= self.length) {
                    return Err(Error::Parameter("click position beyond signal length".into()));
                }
            }
            SyntheticKind::WhiteNoise { amplitude, .. } => {
                if !amplitude.is_finite() {
                    return Err(Error::Parameter("noise amplitude must be finite".into()));
                }
            }
            SyntheticKind::PowerLawCoeffSignal {
                exponent,
                atoms,
                atom_length,
                ..
            } => {
                if !exponent.is_finite() || *atoms == 0 {
                    return Err(Error::Parameter("power-law signal needs atoms and a finite exponent".into()));
                }
                if *atom_length < 2 || *atom_length > self.length {
                    return Err(Error::Parameter(format!(
                        "atom length {atom_length} must lie in [2, {}]",
                        self.length
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Produces the signal described by `spec`. Pure in `spec`.
pub fn generate(spec: &SyntheticSpec) -> Result<Signal> {
    spec.validate()?;
    let len = spec.length;
    let sr = spec.sample_rate as f64;
    let mut out = vec![0.0; len];
    match &spec.kind {
        SyntheticKind::ToneMelody {
            tones,
            harmonics,
            decay_seconds,
        } => {
            for tone in tones {
                for h in 1..=*harmonics {
                    let freq = tone.fundamental * h as f64;
                    if freq >= sr / 2.0 {
                        break;
                    }
                    let amp = tone.amplitude / h as f64;
                    let omega = 2.0 * PI * freq / sr;
                    for (k, y) in out[tone.onset..].iter_mut().enumerate() {
                        let t = k as f64 / sr;
                        *y += amp * (omega * k as f64).sin() * (-t / decay_seconds).exp();
                    }
                }
            }
        }
        SyntheticKind::ClickTrain {
            positions,
            amplitude,
        } => {
            for &p in positions {
                out[p] = *amplitude;
            }
        }
        SyntheticKind::WhiteNoise { seed, amplitude } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for y in out.iter_mut() {
                *y = amplitude * rng.gen_range(-1.0..1.0);
            }
        }
        SyntheticKind::PowerLawCoeffSignal {
            seed,
            exponent,
            atoms,
            atom_length,
            amplitude,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for k in 1..=*atoms {
                let a = amplitude * (k as f64).powf(-exponent);
                let start = rng.gen_range(0..len);
                let freq = rng.gen_range(0.01..0.49);
                let phase = rng.gen_range(0.0..2.0 * PI);
                for j in 0..*atom_length {
                    let w = 0.5 - 0.5 * (2.0 * PI * j as f64 / *atom_length as f64).cos();
                    out[(start + j) % len] += a * w * (2.0 * PI * freq * j as f64 + phase).cos();
                }
            }
        }
    }
    Signal::new(out, spec.sample_rate)
}
