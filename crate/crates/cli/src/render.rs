//! Variable-resolution spectrogram images as binary PGM (P5).

use nsgf::CoefficientSet;
use serde::{Deserialize, Serialize};

pub const IMAGE_HEIGHT: usize = 512;
pub const DB_FLOOR: f64 = -80.0;

/// Axis metadata written next to each image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrogramMeta {
    pub width: usize,
    pub height: usize,
    pub signal_length: usize,
    pub sample_rate: u32,
    /// Samples per pixel column.
    pub samples_per_column: f64,
    /// Frequency of the top row; the bottom row is 0 Hz.
    pub max_frequency_hz: f64,
    pub db_floor: f64,
    /// Magnitude mapped to 0 dB (the largest one of the rendered set).
    pub reference_magnitude: f64,
    pub nonzero_coefficients: usize,
    pub threshold: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrogram {
    pub meta: SpectrogramMeta,
    /// Row-major gray levels, top row is the highest frequency.
    pub pixels: Vec<u8>,
}

impl Spectrogram {
    pub fn pixel(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.meta.width + x]
    }

    /// Frequency shown by row `y`.
    pub fn row_frequency(&self, y: usize) -> f64 {
        let h = self.meta.height;
        self.meta.max_frequency_hz * (h - 1 - y) as f64 / (h - 1) as f64
    }

    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.meta.width, self.meta.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }
}

/// Paints window `n`'s nonnegative-frequency magnitudes over the columns
/// whose time lies in `[a_n, a_{n+1})`, with nearest-bin rows, in dB
/// relative to the largest magnitude of `coeffs`.
pub fn render(coeffs: &CoefficientSet, width: usize, threshold: Option<usize>) -> Spectrogram {
    let height = IMAGE_HEIGHT;
    let len = coeffs.signal_length();
    let layout = coeffs.layout();
    let blocks = coeffs.blocks();
    let half = |n: usize| &blocks[n][..=layout[n].channels / 2];
    let reference = (0..blocks.len())
        .flat_map(|n| half(n).iter().map(|c| c.norm()))
        .fold(0.0, f64::max);

    // windows by start position; columns before the first start belong to
    // the last window (circular time axis)
    let mut by_position: Vec<usize> = (0..layout.len()).collect();
    by_position.sort_by_key(|&n| (layout[n].position, n));
    let samples_per_column = len as f64 / width as f64;

    let mut pixels = vec![0u8; width * height];
    if reference > 0.0 {
        for x in 0..width {
            let t = x as f64 * samples_per_column;
            let k = by_position.partition_point(|&n| layout[n].position as f64 <= t);
            let n = by_position[(k + by_position.len() - 1) % by_position.len()];
            let bins = half(n);
            let top = layout[n].channels as f64 / 2.0;
            for y in 0..height {
                let frac = (height - 1 - y) as f64 / (height - 1) as f64;
                let m = ((frac * top).round() as usize).min(bins.len() - 1);
                pixels[y * width + x] = gray(bins[m].norm() / reference);
            }
        }
    }
    Spectrogram {
        meta: SpectrogramMeta {
            width,
            height,
            signal_length: len,
            sample_rate: coeffs.sample_rate(),
            samples_per_column,
            max_frequency_hz: coeffs.sample_rate() as f64 / 2.0,
            db_floor: DB_FLOOR,
            reference_magnitude: reference,
            nonzero_coefficients: coeffs.nonzero_count(),
            threshold,
        },
        pixels,
    }
}

fn gray(relative: f64) -> u8 {
    if relative <= 0.0 {
        return 0;
    }
    let db = (20.0 * relative.log10()).max(DB_FLOOR);
    ((db - DB_FLOOR) / -DB_FLOOR * 255.0).round() as u8
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_levels() {
        assert_eq!(gray(1.0), 255);
        assert_eq!(gray(0.0), 0);
        assert_eq!(gray(1e-5), 0);
        assert_eq!(gray(1e-2), 128);
    }
}
