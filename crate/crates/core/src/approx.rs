//! Nonlinear N-term approximation by hard thresholding of frame
//! coefficients, error curves and their power-law fits.

use std::io::{self, Write};

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{canonical_dual, frame_diagonal, NsgfSystem};
use crate::signal_io::Signal;
use crate::transform::{analyze, synthesize_complex, CoefficientSet};

/// Errors at or below this value are left out of power-law regression.
pub const FIT_FLOOR: f64 = 1e-14;

/// `10000..=30000` step 1000 followed by `35000..=200000` step 5000.
pub fn standard_grid() -> Vec<usize> {
    (10_000..=30_000)
        .step_by(1000)
        .chain((35_000..=200_000).step_by(5000))
        .collect()
}

/// Candidate coefficients `(n, m)` sorted by decreasing magnitude, ties by
/// `(n, m)`. In half-spectrum mode only bins `m ≤ M_n/2` are candidates and
/// each stands for itself and its conjugate partner.
#[derive(Clone, Debug)]
pub struct ThresholdOrder {
    entries: Vec<(usize, usize)>,
    magnitudes: Vec<f64>,
    half_spectrum: bool,
}

impl ThresholdOrder {
    pub fn new(coeffs: &CoefficientSet, half_spectrum: bool) -> Self {
        let mut keyed: Vec<(f64, usize, usize)> = coeffs
            .blocks()
            .iter()
            .enumerate()
            .flat_map(|(n, block)| {
                let limit = if half_spectrum {
                    block.len() / 2 + 1
                } else {
                    block.len()
                };
                block[..limit]
                    .iter()
                    .enumerate()
                    .map(move |(m, c)| (c.norm(), n, m))
            })
            .collect();
        keyed.par_sort_unstable_by(|a, b| {
            b.0.total_cmp(&a.0)
                .then(a.1.cmp(&b.1))
                .then(a.2.cmp(&b.2))
        });
        Self {
            magnitudes: keyed.iter().map(|k| k.0).collect(),
            entries: keyed.into_iter().map(|k| (k.1, k.2)).collect(),
            half_spectrum,
        }
    }

    /// Number of candidates, the largest admissible `N`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn half_spectrum(&self) -> bool {
        self.half_spectrum
    }

    pub fn entries(&self) -> &[(usize, usize)] {
        &self.entries
    }

    /// Candidate magnitudes in selection order.
    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.len() {
            return Err(Error::Parameter(format!(
                "N = {n} exceeds the {} candidate coefficients",
                self.len()
            )));
        }
        Ok(())
    }

    /// Keeps the first `n` candidates of `coeffs`, which must be the set the
    /// order was built from.
    pub fn apply(&self, coeffs: &CoefficientSet, n: usize) -> Result<CoefficientSet> {
        self.check(n)?;
        let zero = Complex64::new(0.0, 0.0);
        let mut blocks: Vec<Vec<Complex64>> =
            coeffs.blocks().iter().map(|b| vec![zero; b.len()]).collect();
        for &(k, m) in &self.entries[..n] {
            let src = &coeffs.blocks()[k];
            blocks[k][m] = src[m];
            if self.half_spectrum {
                let partner = (src.len() - m) % src.len();
                blocks[k][partner] = src[partner];
            }
        }
        CoefficientSet::new(
            blocks,
            coeffs.layout().to_vec(),
            coeffs.signal_length(),
            coeffs.sample_rate(),
        )
    }

    /// `‖dropped candidates‖₂` for every `N = 0..=len`.
    pub fn tail_norms(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.len() + 1];
        for k in (0..self.len()).rev() {
            out[k] = out[k + 1] + self.magnitudes[k] * self.magnitudes[k];
        }
        out.into_iter().map(f64::sqrt).collect()
    }
}

/// The `n` largest coefficients; everything else set to zero.
pub fn threshold_top_n(coeffs: &CoefficientSet, n: usize, half_spectrum: bool) -> Result<CoefficientSet> {
    ThresholdOrder::new(coeffs, half_spectrum).apply(coeffs, n)
}

/// `‖f - f_rec‖₂ / ‖f‖₂`.
pub fn rms(f: &Signal, f_rec: &Signal) -> Result<f64> {
    if f.len() != f_rec.len() {
        return Err(Error::Dimension(format!(
            "reference has {} samples, reconstruction {}",
            f.len(),
            f_rec.len()
        )));
    }
    let norm = f.norm();
    if norm == 0.0 {
        return Err(Error::Degenerate("zero reference signal".into()));
    }
    let diff: f64 = f
        .samples()
        .iter()
        .zip(f_rec.samples())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(diff.sqrt() / norm)
}

/// Coefficient count per signal sample, `Σ_n M_n / T`.
pub fn redundancy(system: &NsgfSystem) -> f64 {
    system.total_coefficients() as f64 / system.signal_length() as f64
}

/// A signal with its analysis coefficients, canonical dual and selection
/// order, ready for repeated N-term reconstructions.
pub struct Approximator {
    signal: Signal,
    norm: f64,
    coeffs: CoefficientSet,
    dual: NsgfSystem,
    order: ThresholdOrder,
}

impl Approximator {
    pub fn new(f: &Signal, system: &NsgfSystem, half_spectrum: bool) -> Result<Self> {
        let norm = f.norm();
        if norm == 0.0 {
            return Err(Error::Degenerate("zero signal".into()));
        }
        let coeffs = analyze(f, system)?;
        let dual = canonical_dual(system, &frame_diagonal(system))?;
        let order = ThresholdOrder::new(&coeffs, half_spectrum);
        Ok(Self {
            signal: f.clone(),
            norm,
            coeffs,
            dual,
            order,
        })
    }

    pub fn coefficients(&self) -> &CoefficientSet {
        &self.coeffs
    }

    pub fn order(&self) -> &ThresholdOrder {
        &self.order
    }

    pub fn dual(&self) -> &NsgfSystem {
        &self.dual
    }

    /// Largest admissible `N`.
    pub fn capacity(&self) -> usize {
        self.order.len()
    }

    pub fn thresholded(&self, n: usize) -> Result<CoefficientSet> {
        self.order.apply(&self.coeffs, n)
    }

    /// Relative L² error of the `n`-term reconstruction. Full-spectrum
    /// selections may break conjugate symmetry, so the error includes any
    /// imaginary part of the reconstruction.
    pub fn error(&self, n: usize) -> Result<f64> {
        let rec = synthesize_complex(&self.thresholded(n)?, &self.dual)?;
        let diff: f64 = self
            .signal
            .samples()
            .iter()
            .zip(&rec)
            .map(|(x, r)| (Complex64::new(*x, 0.0) - r).norm_sqr())
            .sum();
        Ok(diff.sqrt() / self.norm)
    }

    /// Smallest `N` with `E(N) < target`, found by bisection on the
    /// assumption that `E` is nonincreasing; `None` if even all candidates
    /// miss the target.
    pub fn min_terms_below(&self, target: f64) -> Result<Option<usize>> {
        let mut hi = self.capacity();
        if self.error(hi)? >= target {
            return Ok(None);
        }
        let mut lo = 0;
        // invariant: E(lo) ≥ target (or lo = 0), E(hi) < target
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.error(mid)? < target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if lo == 0 && self.error(0)? < target {
            return Ok(Some(0));
        }
        Ok(Some(hi))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorPoint {
    pub n: usize,
    pub e: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub c: f64,
    pub alpha: f64,
}

impl PowerFit {
    pub fn eval(&self, n: usize) -> f64 {
        self.c * (n as f64).powf(-self.alpha)
    }
}

/// Relative errors over a grid of term counts with the fitted
/// `E(N) ≈ C·N^{-α}`. `fit` is absent when fewer than two errors exceed
/// [`FIT_FLOOR`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub points: Vec<ErrorPoint>,
    pub fit: Option<PowerFit>,
    pub half_spectrum: bool,
}

impl ErrorCurve {
    pub fn is_nonincreasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].e <= w[0].e)
    }

    pub fn error_sum(&self) -> f64 {
        self.points.iter().map(|p| p.e).sum()
    }

    /// Rows `N,E,fitted_E`; `fitted_E` is empty without a fit.
    pub fn write_csv(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "N,E,fitted_E")?;
        for p in &self.points {
            match self.fit {
                Some(fit) => writeln!(out, "{},{:.16e},{:.16e}", p.n, p.e, fit.eval(p.n))?,
                None => writeln!(out, "{},{:.16e},", p.n, p.e)?,
            }
        }
        Ok(())
    }
}

fn check_grid(grid: &[usize], capacity: usize) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Parameter("empty N grid".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter("N grid must be strictly increasing".into()));
    }
    if let Some(&last) = grid.last().filter(|&&n| n > capacity) {
        return Err(Error::Parameter(format!(
            "grid value {last} exceeds the {capacity} candidate coefficients"
        )));
    }
    Ok(())
}

impl Approximator {
    pub fn error_curve(&self, grid: &[usize]) -> Result<ErrorCurve> {
        check_grid(grid, self.capacity())?;
        let points = grid
            .par_iter()
            .map(|&n| self.error(n).map(|e| ErrorPoint { n, e }))
            .collect::<Result<Vec<_>>>()?;
        let fit = power_fit(&points).ok();
        Ok(ErrorCurve {
            points,
            fit,
            half_spectrum: self.order.half_spectrum(),
        })
    }
}

/// Analyzes once, then thresholds and reconstructs with the canonical dual
/// for every grid value.
pub fn error_curve(f: &Signal, system: &NsgfSystem, grid: &[usize], half_spectrum: bool) -> Result<ErrorCurve> {
    Approximator::new(f, system, half_spectrum)?.error_curve(grid)
}

/// Least squares on `(ln N, ln E)`: `alpha = -slope`, `C = e^intercept`.
pub fn power_fit(points: &[ErrorPoint]) -> Result<PowerFit> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.e > FIT_FLOOR && p.n > 0)
        .map(|p| ((p.n as f64).ln(), p.e.ln()))
        .collect();
    if logs.len() < 2 {
        return Err(Error::Fit(format!(
            "{} usable points, need at least 2",
            logs.len()
        )));
    }
    let count = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / count;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all usable points share one N".into()));
    }
    let slope = sxy / sxx;
    Ok(PowerFit {
        c: (my - slope * mx).exp(),
        alpha: -slope,
    })
}

/// `ℓ^p` norm; `p = ∞` gives the maximum. Scaled by the maximum to avoid
/// overflow for large `p`.
pub fn lp_norm(values: impl Iterator<Item = f64> + Clone, p: f64) -> f64 {
    let peak = values.clone().map(f64::abs).fold(0.0, f64::max);
    if peak == 0.0 || p.is_infinite() {
        return peak;
    }
    if p == 2.0 {
        return values.map(|v| v * v).sum::<f64>().sqrt();
    }
    peak * values.map(|v| (v.abs() / peak).powf(p)).sum::<f64>().powf(1.0 / p)
}

pub(crate) fn check_exponent(name: &str, value: f64) -> Result<()> {
    if value >= 1.0 && !value.is_nan() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} = {value} must lie in [1, ∞]")))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SequenceNormParams<'a> {
    pub p: f64,
    pub q: f64,
    pub s: f64,
    /// `ω_n`, one per window.
    pub weights: &'a [f64],
}

/// `‖{ω_n^s·‖c[n][·]‖_p}_n‖_q`.
pub fn sequence_norm(coeffs: &CoefficientSet, params: &SequenceNormParams) -> Result<f64> {
    check_exponent("p", params.p)?;
    check_exponent("q", params.q)?;
    if params.weights.len() != coeffs.blocks().len() {
        return Err(Error::Dimension(format!(
            "{} weights for {} coefficient blocks",
            params.weights.len(),
            coeffs.blocks().len()
        )));
    }
    let local: Vec<f64> = coeffs
        .blocks()
        .iter()
        .zip(params.weights)
        .map(|(b, w)| w.powf(params.s) * lp_norm(b.iter().map(|c| c.norm()), params.p))
        .collect();
    Ok(lp_norm(local.iter().copied(), params.q))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacksonPoint {
    pub n: usize,
    /// `‖f - f_N‖₂`.
    pub error: f64,
    /// `‖f - f_N‖₂ / (N^{-α}·‖c‖_τ)` with `α = 1/τ - 1/2`.
    pub ratio: f64,
    /// `ℓ²` norm of the dropped coefficients.
    pub tail: f64,
}

fn jackson_points(
    coeffs: &CoefficientSet,
    reference: &[Complex64],
    synthesis: &NsgfSystem,
    tau: f64,
    grid: &[usize],
) -> Result<Vec<JacksonPoint>> {
    if !(1.0..2.0).contains(&tau) {
        return Err(Error::Parameter(format!("tau = {tau} outside [1, 2)")));
    }
    let order = ThresholdOrder::new(coeffs, false);
    check_grid(grid, order.len())?;
    if grid[0] == 0 {
        return Err(Error::Parameter("N = 0 has no rate factor".into()));
    }
    let ones = vec![1.0; coeffs.blocks().len()];
    let norm = sequence_norm(
        coeffs,
        &SequenceNormParams {
            p: tau,
            q: tau,
            s: 0.0,
            weights: &ones,
        },
    )?;
    if norm == 0.0 {
        return Err(Error::Degenerate("coefficient norm vanishes".into()));
    }
    let alpha = 1.0 / tau - 0.5;
    let tails = order.tail_norms();
    grid.par_iter()
        .map(|&n| {
            let rec = synthesize_complex(&order.apply(coeffs, n)?, synthesis)?;
            let error = reference
                .iter()
                .zip(&rec)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            Ok(JacksonPoint {
                n,
                error,
                ratio: error / ((n as f64).powf(-alpha) * norm),
                tail: tails[n],
            })
        })
        .collect()
}

/// Jackson ratios of `f` for full-spectrum thresholding of its analysis
/// coefficients, reconstructed with the canonical dual.
pub fn jackson_ratios(f: &Signal, system: &NsgfSystem, tau: f64, grid: &[usize]) -> Result<Vec<JacksonPoint>> {
    let coeffs = analyze(f, system)?;
    let dual = canonical_dual(system, &frame_diagonal(system))?;
    let reference: Vec<Complex64> = f.samples().iter().map(|&x| Complex64::new(x, 0.0)).collect();
    jackson_points(&coeffs, &reference, &dual, tau, grid)
}

/// Jackson ratios for a prescribed coefficient sequence: the reference is
/// its synthesis by `system` and `f_N` the synthesis of its `N` largest
/// entries.
pub fn jackson_ratios_from_coefficients(
    theta: &CoefficientSet,
    system: &NsgfSystem,
    tau: f64,
    grid: &[usize],
) -> Result<Vec<JacksonPoint>> {
    let reference = synthesize_complex(theta, system)?;
    jackson_points(theta, &reference, system, tau, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{make_stationary_gabor, SystemKind, Window};
    use crate::transform::BlockLayout;

    fn set_from(mags: &[f64]) -> CoefficientSet {
        let block: Vec<Complex64> = mags.iter().map(|&m| Complex64::new(m, 0.0)).collect();
        let layout = vec![BlockLayout {
            position: 0,
            length: mags.len(),
            channels: mags.len(),
        }];
        CoefficientSet::new(vec![block], layout, mags.len(), 1000).unwrap()
    }

    #[test]
    fn keeps_largest() {
        let c = set_from(&[3.0, 1.0, 4.0, 1.0, 5.0]);
        let kept = threshold_top_n(&c, 2, false).unwrap();
        let re: Vec<f64> = kept.blocks()[0].iter().map(|c| c.re).collect();
        assert_eq!(re, vec![0.0, 0.0, 4.0, 0.0, 5.0]);
        assert_eq!(threshold_top_n(&c, 5, false).unwrap(), c);
        assert!(threshold_top_n(&c, 6, false).is_err());
    }

    #[test]
    fn ties_break_by_index() {
        let c = set_from(&[1.0, 2.0, 1.0, 1.0]);
        let kept = threshold_top_n(&c, 2, false).unwrap();
        let re: Vec<f64> = kept.blocks()[0].iter().map(|c| c.re).collect();
        assert_eq!(re, vec![1.0, 2.0, 0.0, 0.0]);
    }

    #[test]
    fn half_spectrum_keeps_partners() {
        let block = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 3.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, -3.0),
        ];
        let layout = vec![BlockLayout {
            position: 0,
            length: 4,
            channels: 4,
        }];
        let c = CoefficientSet::new(vec![block.clone()], layout, 4, 1000).unwrap();
        let order = ThresholdOrder::new(&c, true);
        assert_eq!(order.len(), 3);
        let kept = order.apply(&c, 1).unwrap();
        assert_eq!(kept.blocks()[0][1], block[1]);
        assert_eq!(kept.blocks()[0][3], block[3]);
        assert_eq!(kept.blocks()[0][0], Complex64::new(0.0, 0.0));
        assert!(kept.is_hermitian());
    }

    #[test]
    fn rms_by_hand() {
        let f = Signal::new(vec![3.0, 4.0], 10).unwrap();
        let half = Signal::new(vec![3.0, 0.0], 10).unwrap();
        let zero = Signal::new(vec![0.0, 0.0], 10).unwrap();
        assert!((rms(&f, &half).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(rms(&f, &zero).unwrap(), 1.0);
        assert_eq!(rms(&f, &f).unwrap(), 0.0);
        assert!(rms(&zero, &f).is_err());
    }

    #[test]
    fn redundancy_values() {
        let t = 3 * 1024 * 8;
        assert_eq!(redundancy(&make_stationary_gabor(t, 1024, 2048, 2048).unwrap()), 2.0);
        assert_eq!(redundancy(&make_stationary_gabor(t, 1024, 1536, 1536).unwrap()), 1.5);
        let single = NsgfSystem::new(
            vec![Window::new(vec![1.0; 64], 0, 64).unwrap()],
            64,
            SystemKind::Stationary,
        )
        .unwrap();
        assert_eq!(redundancy(&single), 1.0);
    }

    #[test]
    fn exact_power_laws() {
        let pts = |c: f64, a: f64| -> Vec<ErrorPoint> {
            standard_grid()
                .into_iter()
                .map(|n| ErrorPoint {
                    n,
                    e: c * (n as f64).powf(-a),
                })
                .collect()
        };
        let fit = power_fit(&pts(1.0, 0.5)).unwrap();
        assert!((fit.alpha - 0.5).abs() < 1e-12 && (fit.c - 1.0).abs() < 1e-12);
        let fit = power_fit(&pts(4.0, 1.3)).unwrap();
        assert!((fit.alpha - 1.3).abs() < 1e-10 && (fit.c - 4.0).abs() / 4.0 < 1e-10);
        let fit = power_fit(&pts(0.3, 0.0)).unwrap();
        assert!(fit.alpha.abs() < 1e-12);
        let few = [ErrorPoint { n: 5, e: 0.1 }, ErrorPoint { n: 6, e: 0.0 }];
        assert!(matches!(power_fit(&few), Err(Error::Fit(_))));
    }

    #[test]
    fn grid_has_55_values() {
        let g = standard_grid();
        assert_eq!(g.len(), 55);
        assert_eq!((g[0], g[20], g[21], g[54]), (10_000, 30_000, 35_000, 200_000));
    }

    #[test]
    fn sequence_norm_by_hand() {
        let c = set_from(&[3.0, 4.0]);
        let norm = |p, q, s, w: &[f64]| {
            sequence_norm(&c, &SequenceNormParams { p, q, s, weights: w }).unwrap()
        };
        assert!((norm(2.0, 2.0, 1.0, &[2.0]) - 10.0).abs() < 1e-14);
        assert_eq!(norm(f64::INFINITY, f64::INFINITY, 0.0, &[2.0]), 4.0);
        assert!((norm(1.0, 1.0, 0.0, &[2.0]) - 7.0).abs() < 1e-14);
        assert!(sequence_norm(&c, &SequenceNormParams { p: 2.0, q: 2.0, s: 0.0, weights: &[] }).is_err());
        assert!(sequence_norm(&c, &SequenceNormParams { p: 0.5, q: 2.0, s: 0.0, weights: &[1.0] }).is_err());
    }

    #[test]
    fn lp_norm_handles_large_p() {
        let v = [1e200, 1e200];
        let n = lp_norm(v.iter().copied(), 8.0);
        assert!((n / 1e200 - 2f64.powf(1.0 / 8.0)).abs() < 1e-12);
    }

    #[test]
    fn perfect_reconstruction_at_full_count() {
        let sys = make_stationary_gabor(256, 32, 64, 64).unwrap();
        let f = Signal::new((0..256).map(|l| ((l * 37 % 101) as f64).sin()).collect(), 100).unwrap();
        let approx = Approximator::new(&f, &sys, true).unwrap();
        let curve = approx.error_curve(&[approx.capacity()]).unwrap();
        assert!(curve.points[0].e <= 1e-10);
        assert!(curve.fit.is_none());
        assert_eq!(approx.error(0).unwrap(), 1.0);
    }
}
