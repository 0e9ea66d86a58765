//! Onset-driven window scheduling for scale frames.
//!
//! Short windows sit on the onsets, the lengths double on the way into a
//! gap and halve again towards the next onset, so neighboring windows are
//! always equally long or differ by a factor of two.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::signal_io::Signal;
use crate::window::hann;

/// Flux peaks below this fraction of the strongest peak are ignored.
const FLUX_FLOOR: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OnsetParams {
    pub stft_hop: usize,
    pub stft_channels: usize,
    /// Running-median half width in frames.
    pub median_halfwidth: usize,
    pub threshold_scale: f64,
    /// Minimal onset distance in samples.
    pub min_gap: usize,
}

impl Default for OnsetParams {
    fn default() -> Self {
        Self {
            stft_hop: 512,
            stft_channels: 2048,
            median_halfwidth: 8,
            threshold_scale: 1.5,
            min_gap: 2048,
        }
    }
}

impl OnsetParams {
    pub fn validate(&self) -> Result<()> {
        if self.stft_hop == 0 || self.stft_channels == 0 {
            return Err(Error::Parameter("STFT hop and channels must be positive".into()));
        }
        if !fft::has_small_factors(self.stft_channels) {
            return Err(Error::Parameter(format!(
                "STFT channel count {} must be 7-smooth",
                self.stft_channels
            )));
        }
        if !(self.threshold_scale > 0.0 && self.threshold_scale.is_finite()) {
            return Err(Error::Parameter("threshold scale must be positive".into()));
        }
        Ok(())
    }

    /// Same parameters with `min_gap` raised to half the longest ladder
    /// window, so every merged onset pair stays schedulable.
    pub fn for_ladder(&self, ladder: &[usize]) -> Self {
        let longest = ladder.iter().copied().max().unwrap_or(0);
        Self {
            min_gap: self.min_gap.max(longest / 2),
            ..self.clone()
        }
    }
}

/// Magnitudes are compressed as `ln(1 + |X|/(COMPRESSION·max|X|))` before
/// differencing, which keeps slow beating between sustained partials well
/// below the jump caused by a new note.
const COMPRESSION: f64 = 1e-3;

/// Half-wave rectified flux of log-compressed STFT magnitudes. Frame `k`
/// covers `k·hop .. k·hop + channels` and only frames inside the signal are
/// used; frame 0 is compared against silence.
pub fn spectral_flux(f: &Signal, params: &OnsetParams) -> Result<Vec<f64>> {
    params.validate()?;
    let n = params.stft_channels;
    if f.len() <= n {
        return Err(Error::Parameter(format!(
            "signal of {} samples is not longer than the {n}-point STFT",
            f.len()
        )));
    }
    let x = f.samples();
    let window = hann(n);
    let plan = fft::forward(n);
    let frames = (f.len() - n) / params.stft_hop + 1;
    let mags: Vec<Vec<f64>> = (0..frames)
        .into_par_iter()
        .map(|k| {
            let start = k * params.stft_hop;
            let mut buf: Vec<Complex64> = window
                .iter()
                .zip(&x[start..start + n])
                .map(|(w, v)| Complex64::new(v * w, 0.0))
                .collect();
            plan.process(&mut buf);
            buf[..n / 2 + 1].iter().map(|c| c.norm()).collect()
        })
        .collect();
    let peak = mags.iter().flatten().copied().fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(vec![0.0; frames]);
    }
    let scale = 1.0 / (COMPRESSION * peak);
    let silence = vec![0.0; n / 2 + 1];
    Ok((0..frames)
        .map(|k| {
            let prev = if k == 0 { &silence } else { &mags[k - 1] };
            mags[k]
                .iter()
                .zip(prev)
                .map(|(a, b)| ((a * scale).ln_1p() - (b * scale).ln_1p()).max(0.0))
                .sum()
        })
        .collect())
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

/// Onset positions in samples, sorted. A frame is an onset when its flux
/// is a local maximum exceeding `threshold_scale` times the running median;
/// peaks closer than `min_gap` keep only the stronger one.
///
/// After log compression the flux peaks in the first frame where the new
/// event carries appreciable window weight, i.e. while it lies in the last
/// quarter of the frame, so onsets are reported three quarters into it.
pub fn detect_onsets(f: &Signal, params: &OnsetParams) -> Result<Vec<usize>> {
    let flux = spectral_flux(f, params)?;
    let peak = flux.iter().copied().fold(0.0, f64::max);
    if peak <= 0.0 {
        return Ok(Vec::new());
    }
    let h = params.median_halfwidth;
    let mut candidates: Vec<(usize, f64)> = Vec::new();
    let mut scratch = Vec::with_capacity(2 * h + 1);
    for k in 0..flux.len() {
        let v = flux[k];
        if v < FLUX_FLOOR * peak {
            continue;
        }
        let left = k == 0 || v >= flux[k - 1];
        let right = k + 1 == flux.len() || v > flux[k + 1];
        if !(left && right) {
            continue;
        }
        scratch.clear();
        scratch.extend_from_slice(&flux[k.saturating_sub(h)..(k + h + 1).min(flux.len())]);
        if v > params.threshold_scale * median(&mut scratch) {
            let pos = k * params.stft_hop + 3 * params.stft_channels / 4;
            candidates.push((pos, v));
        }
    }
    candidates.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut kept: Vec<usize> = Vec::new();
    for (pos, _) in candidates {
        if kept.iter().all(|&q| q.abs_diff(pos) >= params.min_gap) {
            kept.push(pos);
        }
    }
    kept.sort_unstable();
    Ok(kept)
}

/// `base·2^k` for `k = 0..levels`.
pub fn ladder(base: usize, levels: usize) -> Result<Vec<usize>> {
    if base == 0 || levels == 0 {
        return Err(Error::Parameter("ladder needs a positive base and level count".into()));
    }
    (0..levels)
        .map(|k| {
            base.checked_shl(k as u32)
                .filter(|l| l >> k == base)
                .ok_or_else(|| Error::Parameter("ladder length overflows".into()))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub length: usize,
    /// First sample of the window, in `[0, T)`.
    pub position: usize,
}

/// Windows of a scale frame, listed in time order around the circle
/// starting at the smallest position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowSchedule {
    entries: Vec<ScheduleEntry>,
    ladder: Vec<usize>,
    signal_length: usize,
}

impl WindowSchedule {
    /// Checks only that entries are well formed; use
    /// [`WindowSchedule::check_invariants`] for the scale-frame rules.
    pub fn new(entries: Vec<ScheduleEntry>, ladder: Vec<usize>, signal_length: usize) -> Result<Self> {
        if entries.is_empty() || ladder.is_empty() || signal_length == 0 {
            return Err(Error::Parameter(
                "schedule needs entries, a ladder and a positive length".into(),
            ));
        }
        for e in &entries {
            if e.length == 0 || e.length > signal_length || e.position >= signal_length {
                return Err(Error::Parameter(format!(
                    "entry {e:?} does not fit a signal of length {signal_length}"
                )));
            }
        }
        Ok(Self {
            entries,
            ladder,
            signal_length,
        })
    }

    pub fn entries(&self) -> &[ScheduleEntry] {
        &self.entries
    }

    pub fn ladder(&self) -> &[usize] {
        &self.ladder
    }

    pub fn signal_length(&self) -> usize {
        self.signal_length
    }

    /// Ladder membership, adjacent length ratios in {1/2, 1, 2}, strictly
    /// increasing positions and positive overlap of cyclically consecutive
    /// windows.
    pub fn check_invariants(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Parameter(format!("schedule invariant: {msg}")));
        let t = self.signal_length;
        for (j, e) in self.entries.iter().enumerate() {
            if !self.ladder.contains(&e.length) {
                return fail(format!("entry {j} length {} not in ladder", e.length));
            }
        }
        if self.entries.windows(2).any(|w| w[0].position >= w[1].position) {
            return fail("positions not strictly increasing".into());
        }
        let count = self.entries.len();
        for j in 0..count {
            let a = self.entries[j];
            let b = self.entries[(j + 1) % count];
            if !(a.length == b.length || a.length == 2 * b.length || b.length == 2 * a.length) {
                return fail(format!("entries {j}/{} have lengths {} and {}", (j + 1) % count, a.length, b.length));
            }
            let step = if count == 1 {
                t
            } else {
                (b.position + t - a.position) % t
            };
            let step = if step == 0 { t } else { step };
            if step >= a.length {
                return fail(format!("no overlap between entry {j} and its successor"));
            }
        }
        Ok(())
    }
}

fn nominal_hop(a: usize, b: usize, overlap: f64) -> f64 {
    (1.0 - overlap) * (a + b) as f64 / 2.0
}

/// Lengths `ladder[0..=peak]`, `repeats` more peak windows, then back down.
fn mountain(ladder: &[usize], peak: usize, repeats: usize) -> Vec<usize> {
    let mut seq: Vec<usize> = ladder[..=peak].to_vec();
    seq.extend(std::iter::repeat(ladder[peak]).take(repeats));
    seq.extend(ladder[..peak].iter().rev());
    seq
}

fn span(seq: &[usize], overlap: f64) -> f64 {
    seq.windows(2).map(|w| nominal_hop(w[0], w[1], overlap)).sum()
}

/// Window lengths from one onset to the next (both included) and their
/// center offsets, which end exactly at `gap`.
fn fill_gap(gap: usize, ladder: &[usize], overlap: f64) -> Option<(Vec<usize>, Vec<usize>)> {
    let g = gap as f64;
    let shortest = nominal_hop(ladder[0], ladder[0], overlap);
    if g < shortest.round().max(1.0) {
        return None;
    }
    let mut peak = 0;
    while peak + 1 < ladder.len() && span(&mountain(ladder, peak + 1, 0), overlap) <= g {
        peak += 1;
    }
    let base = span(&mountain(ladder, peak, 0), overlap);
    let plateau = nominal_hop(ladder[peak], ladder[peak], overlap);
    let min_repeats = usize::from(peak == 0);
    let lower = (((g - base) / plateau).floor() as usize).max(min_repeats);
    let repeats = [lower, lower + 1]
        .into_iter()
        .filter(|&r| r >= min_repeats)
        .min_by(|&a, &b| {
            let fa = (g / (base + a as f64 * plateau)).ln().abs();
            let fb = (g / (base + b as f64 * plateau)).ln().abs();
            fa.total_cmp(&fb)
        })?;
    let lengths = mountain(ladder, peak, repeats);
    let total = span(&lengths, overlap);
    let scale = g / total;
    let mut cum = 0.0;
    let mut offsets = vec![0];
    for w in lengths.windows(2) {
        cum += nominal_hop(w[0], w[1], overlap);
        offsets.push((cum * scale).round() as usize);
    }
    *offsets.last_mut().expect("at least two windows") = gap;
    Some((lengths, offsets))
}

/// Scale-frame schedule for onsets on a circular signal of length `T`.
///
/// Every gap between consecutive onsets (including the one wrapping past
/// the end) is spanned by a mountain of window lengths: shortest at both
/// onsets, doubling towards the middle up to the ladder maximum, with the
/// peak length repeated to fill long gaps. Window centers advance by
/// `(1 - overlap)·(L + L')/2`, uniformly rescaled per gap so the last
/// center lands exactly on the next onset.
pub fn scale_frame_schedule(
    onsets: &[usize],
    signal_length: usize,
    ladder: &[usize],
    overlap: f64,
) -> Result<WindowSchedule> {
    let t = signal_length;
    if !(overlap > 0.0 && overlap < 1.0) {
        return Err(Error::Parameter(format!("overlap {overlap} outside (0, 1)")));
    }
    if ladder.is_empty() || ladder.windows(2).any(|w| w[1] != 2 * w[0]) || ladder[0] == 0 {
        return Err(Error::Parameter("ladder must be base·2^k, k = 0..levels".into()));
    }
    let longest = *ladder.last().expect("nonempty ladder");
    if longest > t {
        return Err(Error::Parameter(format!(
            "longest window {longest} exceeds signal length {t}"
        )));
    }
    if onsets.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter("onsets must be strictly increasing".into()));
    }
    if onsets.last().is_some_and(|&o| o >= t) {
        return Err(Error::Parameter("onset beyond signal length".into()));
    }

    // (center, length) in time order starting at the first onset
    let mut windows: Vec<(usize, usize)> = Vec::new();
    if onsets.is_empty() {
        let hop = nominal_hop(longest, longest, overlap);
        let lower = ((t as f64 / hop).floor() as usize).max(2);
        let count = [lower, lower + 1]
            .into_iter()
            .min_by(|&a, &b| {
                let fa = (t as f64 / (a as f64 * hop)).ln().abs();
                let fb = (t as f64 / (b as f64 * hop)).ln().abs();
                fa.total_cmp(&fb)
            })
            .expect("two candidates");
        for i in 0..count {
            let center = ((i as f64 * t as f64 / count as f64).round() as usize) % t;
            windows.push((center, longest));
        }
    } else {
        for (i, &onset) in onsets.iter().enumerate() {
            let next = onsets.get(i + 1).copied().unwrap_or(onsets[0] + t);
            let gap = next - onset;
            let (lengths, offsets) =
                fill_gap(gap, ladder, overlap).ok_or_else(|| Error::Scheduling {
                    gap_index: i,
                    start: onset,
                    end: next % t,
                    reason: format!(
                        "gap of {gap} samples is shorter than one hop between shortest windows"
                    ),
                })?;
            for (len, off) in lengths.iter().zip(&offsets).take(lengths.len() - 1) {
                windows.push(((onset + off) % t, *len));
            }
        }
    }

    let mut entries: Vec<ScheduleEntry> = windows
        .iter()
        .map(|&(center, length)| ScheduleEntry {
            length,
            position: (center + t - length / 2 % t) % t,
        })
        .collect();
    let first = entries
        .iter()
        .enumerate()
        .min_by_key(|(j, e)| (e.position, *j))
        .map(|(j, _)| j)
        .unwrap_or(0);
    entries.rotate_left(first);
    let schedule = WindowSchedule::new(entries, ladder.to_vec(), t)?;
    schedule.check_invariants()?;
    Ok(schedule)
}
