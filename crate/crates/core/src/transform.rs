//! FFT-based analysis and synthesis for painless systems.
//!
//! Coefficients are raw inner products with the atoms, phase referenced to
//! the window position:
//! `c[n][m] = Σ_j f(a_n + j)·g_n(j)·e^{-2πi·mj/M_n}`.
//! Synthesis is the matching unnormalized inverse DFT followed by
//! overlap-add, so `synthesize(analyze(f, s), s) = G·f`.

use std::io::{self, Read, Write};

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::frame::NsgfSystem;
use crate::signal_io::Signal;

/// Relative imaginary residue tolerated when synthesizing a real signal.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;

/// Placement of one coefficient block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockLayout {
    pub position: usize,
    /// Window taps.
    pub length: usize,
    pub channels: usize,
}

/// Jagged coefficient array `blocks[n][m]`, `m = 0..M_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSet {
    blocks: Vec<Vec<Complex64>>,
    layout: Vec<BlockLayout>,
    signal_length: usize,
    sample_rate: u32,
}

fn layout_of(system: &NsgfSystem) -> Vec<BlockLayout> {
    system
        .windows()
        .iter()
        .map(|w| BlockLayout {
            position: w.position(),
            length: w.len(),
            channels: w.channels(),
        })
        .collect()
}

impl CoefficientSet {
    pub fn new(
        blocks: Vec<Vec<Complex64>>,
        layout: Vec<BlockLayout>,
        signal_length: usize,
        sample_rate: u32,
    ) -> Result<Self> {
        if blocks.len() != layout.len() {
            return Err(Error::Dimension(format!(
                "{} blocks for {} windows",
                blocks.len(),
                layout.len()
            )));
        }
        for (n, (b, l)) in blocks.iter().zip(&layout).enumerate() {
            if b.len() != l.channels {
                return Err(Error::Dimension(format!(
                    "block {n} has {} entries, expected {}",
                    b.len(),
                    l.channels
                )));
            }
        }
        Ok(Self {
            blocks,
            layout,
            signal_length,
            sample_rate,
        })
    }

    /// All-zero coefficients shaped like `system`.
    pub fn zeros(system: &NsgfSystem, sample_rate: u32) -> Self {
        Self {
            blocks: system
                .windows()
                .iter()
                .map(|w| vec![Complex64::new(0.0, 0.0); w.channels()])
                .collect(),
            layout: layout_of(system),
            signal_length: system.signal_length(),
            sample_rate,
        }
    }

    pub fn blocks(&self) -> &[Vec<Complex64>] {
        &self.blocks
    }

    pub fn blocks_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.blocks
    }

    pub fn layout(&self) -> &[BlockLayout] {
        &self.layout
    }

    pub fn signal_length(&self) -> usize {
        self.signal_length
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn total_count(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn nonzero_count(&self) -> usize {
        self.blocks
            .iter()
            .flatten()
            .filter(|c| c.re != 0.0 || c.im != 0.0)
            .count()
    }

    /// `Σ |c|²`.
    pub fn energy(&self) -> f64 {
        self.blocks.iter().flatten().map(|c| c.norm_sqr()).sum()
    }

    /// Exact test of `c[n][m] = conj(c[n][-m mod M_n])`.
    pub fn is_hermitian(&self) -> bool {
        self.blocks.iter().all(|b| {
            let m = b.len();
            (0..m).all(|k| b[k] == b[(m - k) % m].conj())
        })
    }

    pub fn matches(&self, system: &NsgfSystem) -> bool {
        self.signal_length == system.signal_length() && self.layout == layout_of(system)
    }

    fn ensure_matches(&self, system: &NsgfSystem) -> Result<()> {
        if self.matches(system) {
            Ok(())
        } else {
            Err(Error::Dimension(
                "coefficient layout differs from the synthesis system".into(),
            ))
        }
    }

    /// Little-endian dump: `T`, window count, per window (position, length,
    /// channels) as u64, then each block's interleaved re/im f64 values.
    pub fn write_binary(&self, mut out: impl Write) -> io::Result<()> {
        out.write_all(&(self.signal_length as u64).to_le_bytes())?;
        out.write_all(&(self.layout.len() as u64).to_le_bytes())?;
        for l in &self.layout {
            for v in [l.position, l.length, l.channels] {
                out.write_all(&(v as u64).to_le_bytes())?;
            }
        }
        for c in self.blocks.iter().flatten() {
            out.write_all(&c.re.to_le_bytes())?;
            out.write_all(&c.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(mut input: impl Read, sample_rate: u32) -> Result<Self> {
        fn u64_at(input: &mut impl Read) -> Result<usize> {
            let mut buf = [0u8; 8];
            input.read_exact(&mut buf)?;
            usize::try_from(u64::from_le_bytes(buf))
                .map_err(|_| Error::Format("header value exceeds usize".into()))
        }
        fn f64_at(input: &mut impl Read) -> Result<f64> {
            let mut buf = [0u8; 8];
            input.read_exact(&mut buf)?;
            Ok(f64::from_le_bytes(buf))
        }
        let signal_length = u64_at(&mut input)?;
        let count = u64_at(&mut input)?;
        let mut layout = Vec::with_capacity(count.min(1 << 20));
        for _ in 0..count {
            layout.push(BlockLayout {
                position: u64_at(&mut input)?,
                length: u64_at(&mut input)?,
                channels: u64_at(&mut input)?,
            });
        }
        let mut blocks = Vec::with_capacity(layout.len());
        for l in &layout {
            let mut block = Vec::with_capacity(l.channels);
            for _ in 0..l.channels {
                let re = f64_at(&mut input)?;
                let im = f64_at(&mut input)?;
                block.push(Complex64::new(re, im));
            }
            blocks.push(block);
        }
        Self::new(blocks, layout, signal_length, sample_rate)
    }

    /// CSV rows `n,m,re,im,magnitude`, 17 significant digits.
    pub fn write_csv(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "n,m,re,im,magnitude")?;
        for (n, block) in self.blocks.iter().enumerate() {
            for (m, c) in block.iter().enumerate() {
                writeln!(
                    out,
                    "{n},{m},{:.16e},{:.16e},{:.16e}",
                    c.re,
                    c.im,
                    c.norm()
                )?;
            }
        }
        Ok(())
    }
}

/// Frame coefficients `⟨f, g_{m,n}⟩` of a real signal. Blocks are made
/// exactly Hermitian from their nonnegative-frequency half.
pub fn analyze(f: &Signal, system: &NsgfSystem) -> Result<CoefficientSet> {
    let len = system.signal_length();
    if f.len() != len {
        return Err(Error::Dimension(format!(
            "signal has {} samples, system expects {len}",
            f.len()
        )));
    }
    system.ensure_painless()?;
    let x = f.samples();
    let blocks = system
        .windows()
        .par_iter()
        .map(|w| {
            let m = w.channels();
            let mut buf = vec![Complex64::new(0.0, 0.0); m];
            for (j, g) in w.taps().iter().enumerate() {
                buf[j].re = x[(w.position() + j) % len] * g;
            }
            fft::forward(m).process(&mut buf);
            buf[0].im = 0.0;
            if m % 2 == 0 {
                buf[m / 2].im = 0.0;
            }
            for k in 1..m.div_ceil(2) {
                buf[m - k] = buf[k].conj();
            }
            buf
        })
        .collect();
    CoefficientSet::new(blocks, layout_of(system), len, f.sample_rate())
}

/// `Σ_n g̃_n(l - a_n)·Σ_m c[n][m]·e^{2πi·m(l - a_n)/M_n}` without discarding
/// the imaginary part.
pub fn synthesize_complex(coeffs: &CoefficientSet, dual: &NsgfSystem) -> Result<Vec<Complex64>> {
    coeffs.ensure_matches(dual)?;
    dual.ensure_painless()?;
    let len = dual.signal_length();
    let segments: Vec<Vec<Complex64>> = dual
        .windows()
        .par_iter()
        .zip(coeffs.blocks.par_iter())
        .map(|(w, block)| {
            if block.iter().all(|c| c.re == 0.0 && c.im == 0.0) {
                return Vec::new();
            }
            let mut buf = block.clone();
            fft::inverse(w.channels()).process(&mut buf);
            w.taps()
                .iter()
                .zip(buf)
                .map(|(g, v)| v * *g)
                .collect()
        })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for (w, seg) in dual.windows().iter().zip(&segments) {
        for (j, v) in seg.iter().enumerate() {
            out[(w.position() + j) % len] += v;
        }
    }
    Ok(out)
}

/// Real reconstruction; fails if the imaginary part exceeds
/// [`IMAGINARY_TOLERANCE`] relative to the output norm.
pub fn synthesize(coeffs: &CoefficientSet, dual: &NsgfSystem) -> Result<Signal> {
    let out = synthesize_complex(coeffs, dual)?;
    let total: f64 = out.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let imag: f64 = out.iter().map(|c| c.im * c.im).sum::<f64>().sqrt();
    if imag > IMAGINARY_TOLERANCE * total {
        return Err(Error::SymmetryViolation {
            residue: imag / total,
        });
    }
    Signal::new(out.into_iter().map(|c| c.re).collect(), coeffs.sample_rate)
}

/// `S f`, which for painless systems equals `G·f`.
pub fn apply_frame_operator(f: &Signal, system: &NsgfSystem) -> Result<Signal> {
    synthesize(&analyze(f, system)?, system)
}
