//! Structured coverings of the time axis, moderate weights and bounded
//! admissible partitions of unity (BAPU).
//!
//! Every covering member is the image `(offset, offset + scale)` of the open
//! unit interval under an affine map. Coverings attached to a signal of
//! length `T` are circular: an interval reaching past either end of
//! `[0, T)` wraps around, matching the transform's periodic boundary.
//! Grid points are the integers `0..grid_len`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::NsgfSystem;

pub const DEFAULT_C_STAR: f64 = 0.1;
pub const DEFAULT_PLATEAU: f64 = 0.8;

/// `x ↦ scale·x + offset` with `scale > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    scale: f64,
    offset: f64,
}

impl AffineMap {
    pub fn new(scale: f64, offset: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) || !offset.is_finite() {
            return Err(Error::Parameter(format!(
                "affine map needs finite scale > 0 and finite offset, got ({scale}, {offset})"
            )));
        }
        Ok(Self { scale, offset })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn apply(&self, x: f64) -> f64 {
        self.scale * x + self.offset
    }

    pub fn inverse(&self, y: f64) -> f64 {
        (y - self.offset) / self.scale
    }

    /// Image of the open unit interval.
    pub fn interval(&self) -> (f64, f64) {
        (self.offset, self.offset + self.scale)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructuredCovering {
    maps: Vec<AffineMap>,
    centers: Vec<f64>,
    grid_len: usize,
    circular: bool,
}

impl StructuredCovering {
    pub fn new(
        maps: Vec<AffineMap>,
        centers: Vec<f64>,
        grid_len: usize,
        circular: bool,
    ) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::Parameter("covering needs at least one interval".into()));
        }
        if maps.len() != centers.len() {
            return Err(Error::Dimension(format!(
                "{} intervals but {} centers",
                maps.len(),
                centers.len()
            )));
        }
        if grid_len == 0 {
            return Err(Error::Parameter("grid length must be positive".into()));
        }
        if centers.iter().any(|c| !c.is_finite()) {
            return Err(Error::Parameter("centers must be finite".into()));
        }
        Ok(Self {
            maps,
            centers,
            grid_len,
            circular,
        })
    }

    /// Non-circular covering from explicit `(lo, hi)` intervals.
    pub fn from_intervals(intervals: &[(f64, f64)], centers: Vec<f64>, grid_len: usize) -> Result<Self> {
        let maps = intervals
            .iter()
            .map(|&(lo, hi)| AffineMap::new(hi - lo, lo))
            .collect::<Result<Vec<_>>>()?;
        Self::new(maps, centers, grid_len, false)
    }

    /// Translates `(k·spacing - side/2, k·spacing + side/2)` of a centered
    /// cube, weights centered on the lattice points `k·spacing`; with
    /// `side > spacing` this is the Wiener amalgam covering.
    pub fn amalgam(grid_len: usize, spacing: f64, side: f64) -> Result<Self> {
        if !(spacing > 0.0) || !(side > spacing) {
            return Err(Error::Parameter(format!(
                "amalgam covering needs side {side} > spacing {spacing} > 0"
            )));
        }
        let count = (grid_len as f64 / spacing).ceil() as usize;
        let centers: Vec<f64> = (0..count).map(|k| k as f64 * spacing).collect();
        let maps = centers
            .iter()
            .map(|&c| AffineMap::new(side, c - side / 2.0))
            .collect::<Result<Vec<_>>>()?;
        Self::new(maps, centers, grid_len, true)
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn grid_len(&self) -> usize {
        self.grid_len
    }

    pub fn is_circular(&self) -> bool {
        self.circular
    }

    pub fn interval(&self, n: usize) -> (f64, f64) {
        self.maps[n].interval()
    }

    pub fn intervals(&self) -> Vec<(f64, f64)> {
        self.maps.iter().map(AffineMap::interval).collect()
    }

    fn period(&self) -> Option<f64> {
        self.circular.then_some(self.grid_len as f64)
    }

    /// Whether the point `x` lies in interval `n` (modulo the period when
    /// circular).
    pub fn contains(&self, n: usize, x: f64) -> bool {
        let (lo, hi) = self.interval(n);
        match self.period() {
            None => lo < x && x < hi,
            Some(t) => {
                let r = (x - lo).rem_euclid(t);
                let len = hi - lo;
                (r > 0.0 && r < len) || r + t < len
            }
        }
    }

    /// Whether open intervals `i` and `j` intersect.
    pub fn intersects(&self, i: usize, j: usize) -> bool {
        let (lo1, hi1) = self.interval(i);
        let (lo2, hi2) = self.interval(j);
        let (below, above) = (lo1 - hi2, hi1 - lo2);
        match self.period() {
            None => below < 0.0 && 0.0 < above,
            Some(t) => {
                let k = (above / t).ceil() - 1.0;
                k * t > below
            }
        }
    }

    /// Integer points strictly inside interval `n`: first point and count,
    /// before any wrapping or clipping.
    fn raw_grid_points(&self, n: usize) -> (i64, usize) {
        let (lo, hi) = self.interval(n);
        let first = lo.floor() as i64 + 1;
        let last = hi.ceil() as i64 - 1;
        (first, (last - first + 1).max(0) as usize)
    }

    /// Grid indices of interval `n` with their unwrapped coordinates.
    fn grid_points(&self, n: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (first, count) = self.raw_grid_points(n);
        let len = self.grid_len as i64;
        let circular = self.circular;
        (0..count as i64).filter_map(move |k| {
            let x = first + k;
            if circular {
                Some((x.rem_euclid(len) as usize, x as f64))
            } else if (0..len).contains(&x) {
                Some((x as usize, x as f64))
            } else {
                None
            }
        })
    }

    /// Number of intervals containing each grid point; an interval longer
    /// than the period counts once.
    pub fn multiplicity(&self) -> Vec<usize> {
        let len = self.grid_len;
        let mut diff = vec![0_i64; len + 1];
        for n in 0..self.len() {
            let (first, count) = self.raw_grid_points(n);
            if count == 0 {
                continue;
            }
            if self.circular {
                let (full, rest) = if count >= len { (1, 0) } else { (0, count) };
                diff[0] += full;
                diff[len] -= full;
                let start = first.rem_euclid(len as i64) as usize;
                let end = start + rest;
                if end <= len {
                    diff[start] += 1;
                    diff[end] -= 1;
                } else {
                    diff[start] += 1;
                    diff[len] -= 1;
                    diff[0] += 1;
                    diff[end - len] -= 1;
                }
            } else {
                let a = first.clamp(0, len as i64) as usize;
                let b = (first + count as i64).clamp(0, len as i64) as usize;
                if a < b {
                    diff[a] += 1;
                    diff[b] -= 1;
                }
            }
        }
        let mut acc = 0_i64;
        diff[..len]
            .iter()
            .map(|d| {
                acc += d;
                acc as usize
            })
            .collect()
    }
}

/// Intervals `(a_n - c*·M_n, a_n + M_n + c*·M_n)` of a system, centers at the
/// window midpoints `a_n + M_n/2`.
pub fn covering_from_system(system: &NsgfSystem, c_star: f64) -> Result<StructuredCovering> {
    if !(c_star > 0.0 && c_star.is_finite()) {
        return Err(Error::Parameter(format!("c_star must be positive, got {c_star}")));
    }
    let mut maps = Vec::with_capacity(system.len());
    let mut centers = Vec::with_capacity(system.len());
    for w in system.windows() {
        let period = w.channels() as f64;
        let eps = c_star * period;
        maps.push(AffineMap::new(period + 2.0 * eps, w.position() as f64 - eps)?);
        centers.push(w.position() as f64 + period / 2.0);
    }
    StructuredCovering::new(maps, centers, system.signal_length(), true)
}

/// For every member, the sorted indices of members it intersects (itself
/// included).
pub fn neighbor_sets(cov: &StructuredCovering) -> Vec<Vec<usize>> {
    let intervals = cov.intervals();
    let max_len = intervals
        .iter()
        .map(|(lo, hi)| hi - lo)
        .fold(0.0_f64, f64::max);
    let shifts: Vec<f64> = match cov.period() {
        None => vec![0.0],
        Some(t) => {
            let reach = (max_len / t).ceil() as i64 + 1;
            (-reach..=reach).map(|k| k as f64 * t).collect()
        }
    };
    let mut copies: Vec<(f64, f64, usize)> = intervals
        .iter()
        .enumerate()
        .flat_map(|(n, &(lo, hi))| shifts.iter().map(move |s| (lo + s, hi + s, n)))
        .collect();
    copies.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));

    intervals
        .iter()
        .map(|&(lo, hi)| {
            let from = copies.partition_point(|c| c.0 <= lo - max_len);
            let to = copies.partition_point(|c| c.0 < hi);
            let mut found: Vec<usize> = copies[from..to]
                .iter()
                .filter(|c| c.1 > lo)
                .map(|c| c.2)
                .collect();
            found.sort_unstable();
            found.dedup();
            found
        })
        .collect()
}

/// Largest neighbor-set size `n0`. Fails at the first uncovered grid point.
pub fn check_admissible(cov: &StructuredCovering) -> Result<usize> {
    if let Some(location) = cov.multiplicity().iter().position(|&m| m == 0) {
        return Err(Error::CoveringGap { location });
    }
    Ok(neighbor_sets(cov).iter().map(Vec::len).max().unwrap_or(0))
}

/// Weights `ω_n = 1 + |x_n|` with their moderation constant and center
/// separation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModerateWeight {
    pub values: Vec<f64>,
    /// Smallest `C` with `1+|x| ≤ C·(1+|y|)` for all `x, y` in one interval.
    pub moderation_constant: f64,
    /// Minimal distance between two centers.
    pub separation: f64,
}

pub fn check_weight(cov: &StructuredCovering) -> Result<ModerateWeight> {
    let mut sorted = cov.centers.clone();
    sorted.sort_by(f64::total_cmp);
    let separation = sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    if separation <= 0.0 {
        return Err(Error::Separation("two centers coincide (δ = 0)".into()));
    }
    let moderation_constant = cov
        .maps
        .iter()
        .map(|m| {
            let (lo, hi) = m.interval();
            let sup = 1.0 + lo.abs().max(hi.abs());
            let inf = if lo <= 0.0 && 0.0 <= hi {
                1.0
            } else {
                1.0 + lo.abs().min(hi.abs())
            };
            sup / inf
        })
        .fold(1.0_f64, f64::max);
    Ok(ModerateWeight {
        values: cov.centers.iter().map(|c| 1.0 + c.abs()).collect(),
        moderation_constant,
        separation,
    })
}

/// Smooth profile on `(0, 1)`: one on the centered sub-interval of relative
/// width `plateau`, falling to zero at both ends along `exp(1 - 1/(1 - d²))`.
pub fn bump_profile(t: f64, plateau: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let ramp = (1.0 - plateau) / 2.0;
    let d = if t < ramp {
        (ramp - t) / ramp
    } else if t > 1.0 - ramp {
        (t - (1.0 - ramp)) / ramp
    } else {
        return 1.0;
    };
    (1.0 - 1.0 / (1.0 - d * d)).exp()
}

/// One partition function, stored over the grid points of its interval.
#[derive(Clone, Debug, PartialEq)]
pub struct BapuFunction {
    /// Grid index of `values[0]`; later values follow circularly.
    pub start: usize,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bapu {
    functions: Vec<BapuFunction>,
    grid_len: usize,
}

impl Bapu {
    pub fn functions(&self) -> &[BapuFunction] {
        &self.functions
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn grid_len(&self) -> usize {
        self.grid_len
    }

    /// `(grid index, ψ_n)` pairs of the stored support.
    pub fn support(&self, n: usize) -> impl Iterator<Item = (usize, f64)> + Clone + '_ {
        let f = &self.functions[n];
        let len = self.grid_len;
        f.values
            .iter()
            .enumerate()
            .map(move |(j, &v)| ((f.start + j) % len, v))
    }

    pub fn dense(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.grid_len];
        for (l, v) in self.support(n) {
            out[l] = v;
        }
        out
    }

    /// `max_l |Σ_n ψ_n(l) - 1|`.
    pub fn partition_deviation(&self) -> f64 {
        let mut total = vec![0.0; self.grid_len];
        for n in 0..self.len() {
            for (l, v) in self.support(n) {
                total[l] += v;
            }
        }
        total.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Pointwise `(Σ_n ψ_n²)^{1/2}`, extrema over the grid.
    pub fn overlap_constants(&self) -> (f64, f64) {
        let mut total = vec![0.0; self.grid_len];
        for n in 0..self.len() {
            for (l, v) in self.support(n) {
                total[l] += v * v;
            }
        }
        let lo = total.iter().copied().fold(f64::INFINITY, f64::min).sqrt();
        let hi = total.iter().copied().fold(0.0, f64::max).sqrt();
        (lo, hi)
    }
}

/// `ψ_n(x) = Φ(T_n^{-1}x) / Σ_k Φ(T_k^{-1}x)` sampled on the grid.
pub fn build_bapu(cov: &StructuredCovering, plateau: f64) -> Result<Bapu> {
    if !(plateau > 0.0 && plateau < 1.0) {
        return Err(Error::Parameter(format!("plateau {plateau} outside (0, 1)")));
    }
    let len = cov.grid_len;
    let mut functions = Vec::with_capacity(cov.len());
    for (n, map) in cov.maps.iter().enumerate() {
        let (first, count) = cov.raw_grid_points(n);
        let (start, width) = if cov.circular {
            (first.rem_euclid(len as i64) as usize, count.min(len))
        } else {
            let a = first.clamp(0, len as i64);
            let b = (first + count as i64).clamp(0, len as i64);
            (a as usize, (b - a) as usize)
        };
        let mut values = vec![0.0; width];
        for (l, x) in cov.grid_points(n) {
            let j = (l + len - start) % len;
            values[j] += bump_profile(map.inverse(x), plateau);
        }
        functions.push(BapuFunction { start, values });
    }

    let mut total = vec![0.0; len];
    for f in &functions {
        for (j, v) in f.values.iter().enumerate() {
            total[(f.start + j) % len] += v;
        }
    }
    if let Some(location) = total.iter().position(|&s| s <= 0.0) {
        return Err(Error::CoveringGap { location });
    }
    for f in &mut functions {
        for (j, v) in f.values.iter_mut().enumerate() {
            *v /= total[(f.start + j) % len];
        }
    }
    Ok(Bapu {
        functions,
        grid_len: len,
    })
}

/// Serializable covering summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringReport {
    pub intervals: Vec<(f64, f64)>,
    pub n0: Option<usize>,
    pub separation: Option<f64>,
    pub moderation_constant: Option<f64>,
    pub partition_deviation: Option<f64>,
    pub errors: Vec<String>,
}

pub fn covering_report(cov: &StructuredCovering, plateau: f64) -> CoveringReport {
    let mut errors = Vec::new();
    let n0 = check_admissible(cov).map_err(|e| errors.push(e.to_string())).ok();
    let weight = check_weight(cov).map_err(|e| errors.push(e.to_string())).ok();
    let deviation = build_bapu(cov, plateau)
        .map(|b| b.partition_deviation())
        .map_err(|e| errors.push(e.to_string()))
        .ok();
    CoveringReport {
        intervals: cov.intervals(),
        n0,
        separation: weight.as_ref().map(|w| w.separation),
        moderation_constant: weight.as_ref().map(|w| w.moderation_constant),
        partition_deviation: deviation,
        errors,
    }
}
