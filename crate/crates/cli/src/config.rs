//! Experiment configuration documents and the `--grid` syntax.

use std::path::{Path, PathBuf};

use nsgf::adapt::{detect_onsets, ladder, scale_frame_schedule, OnsetParams};
use nsgf::approx::standard_grid;
use nsgf::frame::{make_nsgf, make_stationary_gabor, NsgfSystem};
use nsgf::signal_io::{SyntheticKind, SyntheticSpec};
use nsgf::Signal;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Longest signal processed; longer inputs are truncated.
pub const DEFAULT_MAX_LENGTH: usize = 1 << 19;
pub const DEFAULT_TARGET_ERROR: f64 = 0.01;
pub const DEFAULT_SPECTROGRAM_WIDTH: usize = 1024;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSpec {
    Wav(PathBuf),
    Synthetic(SyntheticSpec),
    /// Every `.wav` file of a directory, in name order.
    Directory(PathBuf),
    SyntheticCorpus(Vec<SyntheticSpec>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TransformSpec {
    Gabor {
        hop: usize,
        channels: usize,
        window_length: usize,
    },
    ScaleFrame {
        #[serde(default = "default_base")]
        base: usize,
        #[serde(default = "default_levels")]
        levels: usize,
        #[serde(default = "default_overlap")]
        overlap: f64,
        #[serde(default)]
        onset: OnsetParams,
    },
}

fn default_base() -> usize {
    192
}

fn default_levels() -> usize {
    8
}

fn default_overlap() -> f64 {
    0.5
}

impl TransformSpec {
    pub fn gabor(hop: usize, channels: usize, window_length: usize) -> Self {
        TransformSpec::Gabor {
            hop,
            channels,
            window_length,
        }
    }

    pub fn default_scale_frame() -> Self {
        TransformSpec::ScaleFrame {
            base: default_base(),
            levels: default_levels(),
            overlap: default_overlap(),
            onset: OnsetParams::default(),
        }
    }

    /// The three stationary systems and the scale frame of the standard
    /// comparison.
    pub fn standard_set() -> Vec<Self> {
        vec![
            Self::gabor(1024, 2048, 2048),
            Self::gabor(1536, 2048, 2048),
            Self::gabor(1024, 1536, 1536),
            Self::default_scale_frame(),
        ]
    }

    /// File-name friendly identifier.
    pub fn label(&self) -> String {
        match self {
            TransformSpec::Gabor {
                hop,
                channels,
                window_length,
            } => format!("gabor_{hop}_{channels}_{window_length}"),
            TransformSpec::ScaleFrame { base, levels, .. } => format!("scale_frame_{base}x{levels}"),
        }
    }

    fn hop(&self) -> Option<usize> {
        match self {
            TransformSpec::Gabor { hop, .. } => Some(*hop),
            TransformSpec::ScaleFrame { .. } => None,
        }
    }

    pub fn build(&self, f: &Signal) -> nsgf::Result<NsgfSystem> {
        match self {
            TransformSpec::Gabor {
                hop,
                channels,
                window_length,
            } => make_stationary_gabor(f.len(), *hop, *channels, *window_length),
            TransformSpec::ScaleFrame {
                base,
                levels,
                overlap,
                onset,
            } => {
                let lad = ladder(*base, *levels)?;
                let onsets = detect_onsets(f, &onset.for_ladder(&lad))?;
                log::info!("{} onsets detected", onsets.len());
                make_nsgf(&scale_frame_schedule(&onsets, f.len(), &lad, *overlap)?, f.len())
            }
        }
    }

    fn validate(&self) -> CliResult<()> {
        match self {
            TransformSpec::Gabor {
                hop,
                channels,
                window_length,
            } => {
                if *hop == 0 || *channels == 0 || *window_length == 0 {
                    return Err(CliError::Validation(format!(
                        "{}: hop, channels and window length must be positive",
                        self.label()
                    )));
                }
            }
            TransformSpec::ScaleFrame {
                base,
                levels,
                overlap,
                onset,
            } => {
                ladder(*base, *levels)?;
                onset.validate()?;
                if !(*overlap > 0.0 && *overlap < 1.0) {
                    return Err(CliError::Validation(format!("overlap {overlap} outside (0, 1)")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmitFlags {
    pub csv: bool,
    pub pgm: bool,
    pub json: bool,
}

impl Default for EmitFlags {
    fn default() -> Self {
        Self {
            csv: true,
            pgm: true,
            json: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub input: InputSpec,
    #[serde(default = "TransformSpec::standard_set")]
    pub transforms: Vec<TransformSpec>,
    #[serde(default = "standard_grid")]
    pub n_grid: Vec<usize>,
    #[serde(default)]
    pub outputs: Option<PathBuf>,
    #[serde(default)]
    pub emit: EmitFlags,
    #[serde(default = "default_true")]
    pub half_spectrum: bool,
    /// Replaces the seeds of seeded synthetic inputs.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_max_length")]
    pub max_length: usize,
    /// Relative error whose smallest achieving N is reported.
    #[serde(default = "default_target")]
    pub target_error: f64,
    #[serde(default = "default_width")]
    pub spectrogram_width: usize,
}

fn default_true() -> bool {
    true
}

fn default_max_length() -> usize {
    DEFAULT_MAX_LENGTH
}

fn default_target() -> f64 {
    DEFAULT_TARGET_ERROR
}

fn default_width() -> usize {
    DEFAULT_SPECTROGRAM_WIDTH
}

impl ExperimentConfig {
    pub fn new(input: InputSpec) -> Self {
        Self {
            input,
            transforms: TransformSpec::standard_set(),
            n_grid: standard_grid(),
            outputs: None,
            emit: EmitFlags::default(),
            half_spectrum: true,
            seed: None,
            max_length: DEFAULT_MAX_LENGTH,
            target_error: DEFAULT_TARGET_ERROR,
            spectrogram_width: DEFAULT_SPECTROGRAM_WIDTH,
        }
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.transforms.is_empty() {
            return Err(CliError::Validation("no transforms configured".into()));
        }
        if self.n_grid.is_empty() {
            return Err(CliError::Validation("empty N grid".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) || self.n_grid[0] == 0 {
            return Err(CliError::Validation(
                "N grid must be positive and strictly increasing".into(),
            ));
        }
        if self.max_length == 0 || self.spectrogram_width == 0 {
            return Err(CliError::Validation(
                "max_length and spectrogram_width must be positive".into(),
            ));
        }
        if !(self.target_error > 0.0) {
            return Err(CliError::Validation("target_error must be positive".into()));
        }
        for t in &self.transforms {
            t.validate()?;
        }
        let mut labels: Vec<String> = self.transforms.iter().map(TransformSpec::label).collect();
        labels.sort();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(CliError::Validation("two transforms share a label".into()));
        }
        match &self.input {
            InputSpec::Synthetic(s) => s.validate()?,
            InputSpec::SyntheticCorpus(list) => {
                for s in list {
                    s.validate()?;
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Applies `seed` to seeded synthetic inputs.
    pub fn seeded(mut self) -> Self {
        if let Some(seed) = self.seed {
            let reseed = |spec: &mut SyntheticSpec| match &mut spec.kind {
                SyntheticKind::WhiteNoise { seed: s, .. }
                | SyntheticKind::PowerLawCoeffSignal { seed: s, .. } => *s = seed,
                _ => {}
            };
            match &mut self.input {
                InputSpec::Synthetic(s) => reseed(s),
                InputSpec::SyntheticCorpus(list) => list.iter_mut().for_each(reseed),
                _ => {}
            }
        }
        self
    }

    /// Largest usable length: at most `max_length` and `len`, and a
    /// multiple of every stationary hop.
    pub fn usable_length(&self, len: usize) -> usize {
        let step = self
            .transforms
            .iter()
            .filter_map(TransformSpec::hop)
            .fold(1, lcm);
        len.min(self.max_length) / step * step
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// `standard`, or comma-separated items that are either single
/// values or `start:end:step` ranges with inclusive end.
pub fn parse_grid(spec: &str) -> CliResult<Vec<usize>> {
    let spec = spec.trim();
    if spec == "standard" {
        return Ok(standard_grid());
    }
    let bad = |item: &str| CliError::Validation(format!("bad grid item '{item}'"));
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        let nums = parts
            .iter()
            .map(|p| p.trim().parse::<usize>().map_err(|_| bad(item)))
            .collect::<CliResult<Vec<_>>>()?;
        match nums.as_slice() {
            [v] => out.push(*v),
            [a, b, step] if *step > 0 && a <= b => out.extend((*a..=*b).step_by(*step)),
            _ => return Err(bad(item)),
        }
    }
    if out.is_empty() {
        return Err(CliError::Validation("empty N grid".into()));
    }
    Ok(out)
}
