//! Shared FFT plans.
//!
//! Block lengths are restricted to 2^a·3^b·5^c·7^d so every transform on the
//! measured path runs through a mixed-radix plan.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::{Fft, FftDirection, FftPlanner};

/// Largest prime factor accepted for a block length.
pub const MAX_PRIME_FACTOR: usize = 7;

pub fn has_small_factors(mut n: usize) -> bool {
    if n == 0 {
        return false;
    }
    for p in [2, 3, 5, 7] {
        while n % p == 0 {
            n /= p;
        }
    }
    n == 1
}

type PlanKey = (usize, bool);

fn plans() -> &'static Mutex<(FftPlanner<f64>, HashMap<PlanKey, Arc<dyn Fft<f64>>>)> {
    static PLANS: OnceLock<Mutex<(FftPlanner<f64>, HashMap<PlanKey, Arc<dyn Fft<f64>>>)>> =
        OnceLock::new();
    PLANS.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())))
}

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    let key = (len, direction == FftDirection::Forward);
    let mut guard = plans().lock().expect("fft plan cache poisoned");
    let (planner, cache) = &mut *guard;
    cache
        .entry(key)
        .or_insert_with(|| planner.plan_fft(len, direction))
        .clone()
}

/// Unnormalized forward transform, `X[m] = Σ x[j]·e^{-2πi·mj/n}`.
pub fn forward(len: usize) -> Arc<dyn Fft<f64>> {
    plan(len, FftDirection::Forward)
}

/// Unnormalized inverse transform, `x[j] = Σ X[m]·e^{+2πi·mj/n}`.
pub fn inverse(len: usize) -> Arc<dyn Fft<f64>> {
    plan(len, FftDirection::Inverse)
}
