//! Decomposition-space norms on the sample grid and their comparison with
//! the coefficient-side sequence norms.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::{check_exponent, lp_norm, sequence_norm, SequenceNormParams};
use crate::covering::{Bapu, ModerateWeight};
use crate::error::{Error, Result};
use crate::frame::NsgfSystem;
use crate::signal_io::Signal;
use crate::transform::analyze;

#[derive(Clone, Copy, Debug)]
pub struct DecompNormParams<'a> {
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub bapu: &'a Bapu,
    pub weights: &'a ModerateWeight,
}

impl DecompNormParams<'_> {
    fn validate(&self) -> Result<()> {
        check_exponent("p", self.p)?;
        check_exponent("q", self.q)?;
        if self.weights.values.len() != self.bapu.len() {
            return Err(Error::Dimension(format!(
                "{} weights for {} partition functions",
                self.weights.values.len(),
                self.bapu.len()
            )));
        }
        Ok(())
    }
}

/// `‖{ω_n^s·‖ψ_n·f‖_p}_n‖_q`, the inner norm a unit-step sum over samples.
pub fn decomposition_norm(f: &Signal, params: &DecompNormParams) -> Result<f64> {
    params.validate()?;
    if f.len() != params.bapu.grid_len() {
        return Err(Error::Dimension(format!(
            "signal has {} samples, partition grid {}",
            f.len(),
            params.bapu.grid_len()
        )));
    }
    let x = f.samples();
    let local: Vec<f64> = (0..params.bapu.len())
        .into_par_iter()
        .map(|n| {
            let inner = lp_norm(params.bapu.support(n).map(|(l, psi)| psi * x[l]), params.p);
            params.weights.values[n].powf(params.s) * inner
        })
        .collect();
    Ok(lp_norm(local.iter().copied(), params.q))
}

/// `sequence_norm(analyze(f), p = 2, q, s) / decomposition_norm(f)`.
pub fn equivalence_ratio(f: &Signal, system: &NsgfSystem, params: &DecompNormParams) -> Result<f64> {
    if params.p != 2.0 {
        return Err(Error::Parameter(format!(
            "norm equivalence needs p = 2, got {}",
            params.p
        )));
    }
    if params.weights.values.len() != system.len() {
        return Err(Error::Dimension(format!(
            "{} weights for {} windows",
            params.weights.values.len(),
            system.len()
        )));
    }
    let decomposition = decomposition_norm(f, params)?;
    if decomposition == 0.0 {
        return Err(Error::Degenerate("zero signal".into()));
    }
    let coeffs = analyze(f, system)?;
    let sequence = sequence_norm(
        &coeffs,
        &SequenceNormParams {
            p: 2.0,
            q: params.q,
            s: params.s,
            weights: &params.weights.values,
        },
    )?;
    Ok(sequence / decomposition)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub q: f64,
    pub s: f64,
    pub ratios: Vec<f64>,
    pub min: f64,
    pub max: f64,
    /// `max / min`; bounded independently of the signals when the norms
    /// are equivalent.
    pub spread: f64,
}

pub fn equivalence_report(
    signals: &[Signal],
    system: &NsgfSystem,
    params: &DecompNormParams,
) -> Result<EquivalenceReport> {
    if signals.is_empty() {
        return Err(Error::Parameter("empty signal battery".into()));
    }
    let ratios = signals
        .iter()
        .map(|f| equivalence_ratio(f, system, params))
        .collect::<Result<Vec<_>>>()?;
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().copied().fold(0.0, f64::max);
    Ok(EquivalenceReport {
        q: params.q,
        s: params.s,
        spread: max / min,
        ratios,
        min,
        max,
    })
}
