//! Painless nonstationary Gabor systems on a circular signal grid.
//!
//! A system is a list of real windows `g_n` (first tap at `a_n`) with `M_n`
//! frequency channels. Window `n` contributes the atoms
//! `g_n(l - a_n)·e^{2πi·m(l - a_n)/M_n}`, `m = 0..M_n`. When every window fits
//! inside its modulation period (`L_n ≤ M_n`) the frame operator is the
//! pointwise multiplication by `G(l) = Σ_n M_n·|g_n(l - a_n)|²`.

use serde::{Deserialize, Serialize};

use crate::adapt::WindowSchedule;
use crate::covering::{check_admissible, check_weight, ModerateWeight, StructuredCovering};
use crate::error::{Error, Result};
use crate::fft::has_small_factors;
use crate::window::{hann, WindowProfile};

/// Ratio `A/B` below which the frame is reported as near-singular.
pub const NEAR_SINGULAR_RATIO: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    Stationary,
    Nonstationary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    taps: Vec<f64>,
    position: usize,
    channels: usize,
    profile: WindowProfile,
}

impl Window {
    pub fn new(taps: Vec<f64>, position: usize, channels: usize) -> Result<Self> {
        Self::with_profile(taps, position, channels, WindowProfile::Custom)
    }

    pub fn hann(length: usize, position: usize, channels: usize) -> Result<Self> {
        Self::with_profile(hann(length), position, channels, WindowProfile::Hann)
    }

    fn with_profile(
        taps: Vec<f64>,
        position: usize,
        channels: usize,
        profile: WindowProfile,
    ) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::Parameter("window needs at least one tap".into()));
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(Error::Parameter("window taps must be finite".into()));
        }
        if taps.iter().all(|&t| t == 0.0) {
            return Err(Error::Parameter("window has no nonzero tap".into()));
        }
        if channels == 0 || !has_small_factors(channels) {
            return Err(Error::Parameter(format!(
                "channel count {channels} must be a positive 7-smooth integer"
            )));
        }
        Ok(Self {
            taps,
            position,
            channels,
            profile,
        })
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// Grid index of the first tap.
    pub fn position(&self) -> usize {
        self.position
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn profile(&self) -> WindowProfile {
        self.profile
    }

    fn map_taps(&self, taps: Vec<f64>) -> Window {
        Window {
            taps,
            position: self.position,
            channels: self.channels,
            profile: WindowProfile::Custom,
        }
    }
}

/// The family `{g_n, a_n, M_n}` on a circular grid of `length` samples.
#[derive(Clone, Debug, PartialEq)]
pub struct NsgfSystem {
    windows: Vec<Window>,
    length: usize,
    kind: SystemKind,
}

impl NsgfSystem {
    /// Structural checks only; whether `L_n ≤ M_n` holds is reported by
    /// [`NsgfSystem::painless_violations`] and enforced by the transforms.
    pub fn new(windows: Vec<Window>, length: usize, kind: SystemKind) -> Result<Self> {
        if windows.is_empty() {
            return Err(Error::Parameter("system needs at least one window".into()));
        }
        if length == 0 {
            return Err(Error::Parameter("signal length must be positive".into()));
        }
        for (n, w) in windows.iter().enumerate() {
            if w.position >= length {
                return Err(Error::Parameter(format!(
                    "window {n} position {} outside [0, {length})",
                    w.position
                )));
            }
            if w.len() > length {
                return Err(Error::Parameter(format!(
                    "window {n} has {} taps, more than the {length} grid points",
                    w.len()
                )));
            }
        }
        if windows.windows(2).any(|p| p[0].position > p[1].position) {
            return Err(Error::Parameter("window positions must be nondecreasing".into()));
        }
        Ok(Self {
            windows,
            length,
            kind,
        })
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    /// Signal length `T`.
    pub fn signal_length(&self) -> usize {
        self.length
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    /// `Σ_n M_n`.
    pub fn total_coefficients(&self) -> usize {
        self.windows.iter().map(|w| w.channels).sum()
    }

    /// Number of nonnegative-frequency bins `Σ_n (⌊M_n/2⌋ + 1)`.
    pub fn half_spectrum_coefficients(&self) -> usize {
        self.windows.iter().map(|w| w.channels / 2 + 1).sum()
    }

    /// Indices of windows with more taps than channels.
    pub fn painless_violations(&self) -> Vec<usize> {
        self.windows
            .iter()
            .enumerate()
            .filter(|(_, w)| w.len() > w.channels)
            .map(|(n, _)| n)
            .collect()
    }

    pub fn ensure_painless(&self) -> Result<()> {
        match self.painless_violations().first() {
            None => Ok(()),
            Some(&n) => Err(Error::PainlessViolation {
                index: n,
                length: self.windows[n].len(),
                channels: self.windows[n].channels,
            }),
        }
    }

    /// True if both systems have the same positions, tap counts and channels.
    pub fn same_structure(&self, other: &NsgfSystem) -> bool {
        self.length == other.length
            && self.windows.len() == other.windows.len()
            && self.windows.iter().zip(&other.windows).all(|(a, b)| {
                a.position == b.position && a.channels == b.channels && a.len() == b.len()
            })
    }

    /// Every tap multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<NsgfSystem> {
        let windows = self
            .windows
            .iter()
            .map(|w| {
                let mut scaled = w.map_taps(w.taps.iter().map(|t| t * factor).collect());
                scaled.profile = w.profile;
                scaled
            })
            .collect();
        NsgfSystem::new(windows, self.length, self.kind)
    }

    /// Multiplies each window tap by `weight(grid index)`.
    fn reweighted(&self, weight: impl Fn(usize) -> f64) -> Result<NsgfSystem> {
        let windows = self
            .windows
            .iter()
            .map(|w| {
                let taps = w
                    .taps
                    .iter()
                    .enumerate()
                    .map(|(j, t)| t * weight((w.position + j) % self.length))
                    .collect();
                w.map_taps(taps)
            })
            .collect();
        NsgfSystem::new(windows, self.length, self.kind)
    }

    pub fn descriptor(&self) -> SystemDescriptor {
        SystemDescriptor {
            signal_length: self.length,
            kind: self.kind,
            windows: self
                .windows
                .iter()
                .map(|w| WindowDescriptor {
                    position: w.position,
                    length: w.len(),
                    channels: w.channels,
                    profile: w.profile,
                    taps: (w.profile == WindowProfile::Custom).then(|| w.taps.clone()),
                })
                .collect(),
        }
    }

    pub fn from_descriptor(desc: &SystemDescriptor) -> Result<NsgfSystem> {
        let windows = desc
            .windows
            .iter()
            .map(|d| {
                let taps = match (&d.taps, d.profile.taps(d.length)) {
                    (Some(t), _) => {
                        if t.len() != d.length {
                            return Err(Error::Dimension(format!(
                                "descriptor lists {} taps for a window of length {}",
                                t.len(),
                                d.length
                            )));
                        }
                        t.clone()
                    }
                    (None, Some(t)) => t,
                    (None, None) => {
                        return Err(Error::Parameter("custom window without taps".into()))
                    }
                };
                Window::with_profile(taps, d.position, d.channels, d.profile)
            })
            .collect::<Result<Vec<_>>>()?;
        NsgfSystem::new(windows, desc.signal_length, desc.kind)
    }
}

/// JSON form of a system: per window (position, length, channels, profile).
/// Taps are listed only for `custom` profiles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemDescriptor {
    pub signal_length: usize,
    pub kind: SystemKind,
    pub windows: Vec<WindowDescriptor>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowDescriptor {
    pub position: usize,
    pub length: usize,
    pub channels: usize,
    pub profile: WindowProfile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taps: Option<Vec<f64>>,
}

/// Uniform Gabor system: `T/hop` Hann windows of `window_length` taps.
pub fn make_stationary_gabor(
    signal_length: usize,
    hop: usize,
    channels: usize,
    window_length: usize,
) -> Result<NsgfSystem> {
    if hop == 0 || window_length == 0 || signal_length == 0 {
        return Err(Error::Parameter(
            "hop, window length and signal length must be positive".into(),
        ));
    }
    if signal_length % hop != 0 {
        return Err(Error::Tiling {
            hop,
            length: signal_length,
        });
    }
    if window_length > channels {
        return Err(Error::PainlessViolation {
            index: 0,
            length: window_length,
            channels,
        });
    }
    let windows = (0..signal_length / hop)
        .map(|k| Window::hann(window_length, k * hop, channels))
        .collect::<Result<Vec<_>>>()?;
    NsgfSystem::new(windows, signal_length, SystemKind::Stationary)
}

/// Hann system with `M_n = L_n` from a window schedule. Fails if some grid
/// point is not reached by any window.
pub fn make_nsgf(schedule: &WindowSchedule, signal_length: usize) -> Result<NsgfSystem> {
    if schedule.signal_length() != signal_length {
        return Err(Error::Dimension(format!(
            "schedule built for length {}, requested {signal_length}",
            schedule.signal_length()
        )));
    }
    let mut entries = schedule.entries().to_vec();
    entries.sort_by_key(|e| (e.position, e.length));
    let windows = entries
        .iter()
        .map(|e| Window::hann(e.length, e.position, e.length))
        .collect::<Result<Vec<_>>>()?;
    let system = NsgfSystem::new(windows, signal_length, SystemKind::Nonstationary)?;
    let diag = frame_diagonal(&system);
    if let Some(hole) = diag.values.iter().position(|&g| g <= 0.0) {
        return Err(Error::NotAFrame(format!(
            "no window covers sample {hole}"
        )));
    }
    Ok(system)
}

/// Sampled frame diagonal `G` with its extrema.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameDiagonal {
    pub values: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
}

pub fn frame_diagonal(system: &NsgfSystem) -> FrameDiagonal {
    let len = system.length;
    let mut values = vec![0.0; len];
    for w in &system.windows {
        let weight = w.channels as f64;
        for (j, t) in w.taps.iter().enumerate() {
            values[(w.position + j) % len] += weight * t * t;
        }
    }
    let lower = values.iter().copied().fold(f64::INFINITY, f64::min);
    let upper = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    FrameDiagonal {
        values,
        lower,
        upper,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub is_frame: bool,
    /// `A ≤ 1e-12·B`: dual windows would be numerically useless.
    pub near_singular: bool,
}

pub fn frame_bounds(diag: &FrameDiagonal) -> FrameBounds {
    let near_singular = diag.lower <= NEAR_SINGULAR_RATIO * diag.upper;
    if near_singular {
        log::warn!(
            "frame bounds A={:e}, B={:e} are near-singular",
            diag.lower,
            diag.upper
        );
    }
    FrameBounds {
        lower: diag.lower,
        upper: diag.upper,
        is_frame: diag.lower > 0.0,
        near_singular,
    }
}

fn require_frame(system: &NsgfSystem, diag: &FrameDiagonal) -> Result<()> {
    if diag.values.len() != system.length {
        return Err(Error::Dimension(format!(
            "diagonal has {} samples, system {}",
            diag.values.len(),
            system.length
        )));
    }
    if !(diag.lower > 0.0) {
        return Err(Error::NotAFrame(format!("lower bound A = {}", diag.lower)));
    }
    Ok(())
}

/// Windows `g_n / G`: the canonical dual, same positions and channels.
pub fn canonical_dual(system: &NsgfSystem, diag: &FrameDiagonal) -> Result<NsgfSystem> {
    require_frame(system, diag)?;
    system.reweighted(|l| 1.0 / diag.values[l])
}

/// Windows `g_n / √G`, whose own diagonal is identically one.
pub fn canonical_tight(system: &NsgfSystem, diag: &FrameDiagonal) -> Result<NsgfSystem> {
    require_frame(system, diag)?;
    system.reweighted(|l| 1.0 / diag.values[l].sqrt())
}

/// Outcome of the painless-system conditions for a system and its covering.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PainlessReport {
    /// `L_n ≤ M_n` for every window.
    pub support_ok: bool,
    pub support_violations: Vec<usize>,
    /// Covering has no gap; `n0` is the largest neighbor-set size.
    pub admissible_ok: bool,
    pub n0: Option<usize>,
    pub weight_ok: bool,
    pub weight: Option<ModerateWeight>,
    /// Every window's nonzero taps lie inside its covering interval and
    /// `|g_n| ≤ C·M_n^{-1/2}` with the reported finite `C`.
    pub window_bound_ok: bool,
    pub window_bound_constant: f64,
    pub messages: Vec<String>,
}

impl PainlessReport {
    pub fn all_ok(&self) -> bool {
        self.support_ok && self.admissible_ok && self.weight_ok && self.window_bound_ok
    }
}

pub fn validate_painless(system: &NsgfSystem, cov: &StructuredCovering) -> PainlessReport {
    let mut messages = Vec::new();
    let support_violations = system.painless_violations();
    let support_ok = support_violations.is_empty();
    if !support_ok {
        messages.push(format!(
            "{} window(s) longer than their channel count",
            support_violations.len()
        ));
    }

    let (admissible_ok, n0) = match check_admissible(cov) {
        Ok(n0) => (true, Some(n0)),
        Err(e) => {
            messages.push(e.to_string());
            (false, None)
        }
    };

    let (weight_ok, weight) = match check_weight(cov) {
        Ok(w) => (true, Some(w)),
        Err(e) => {
            messages.push(e.to_string());
            (false, None)
        }
    };

    let mut window_bound_ok = cov.len() == system.len();
    if !window_bound_ok {
        messages.push("covering and system have different window counts".into());
    }
    let mut constant: f64 = 0.0;
    for (n, w) in system.windows.iter().enumerate() {
        let peak = w.taps.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
        constant = constant.max(peak * (w.channels as f64).sqrt());
        if n >= cov.len() {
            continue;
        }
        let first = w.taps.iter().position(|&t| t != 0.0).unwrap_or(0);
        let last = w.taps.iter().rposition(|&t| t != 0.0).unwrap_or(0);
        let (lo, hi) = cov.interval(n);
        let start = (w.position + first) as f64;
        let end = (w.position + last) as f64;
        if !(lo < start && end < hi) {
            window_bound_ok = false;
            messages.push(format!(
                "window {n} support [{start}, {end}] not inside interval ({lo}, {hi})"
            ));
        }
    }
    if !constant.is_finite() {
        window_bound_ok = false;
    }

    PainlessReport {
        support_ok,
        support_violations,
        admissible_ok,
        n0,
        weight_ok,
        weight,
        window_bound_ok,
        window_bound_constant: constant,
        messages,
    }
}
