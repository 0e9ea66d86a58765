use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Named window shapes. `Custom` marks taps that no closed form describes
/// (e.g. canonical duals).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowProfile {
    Hann,
    Rect,
    Custom,
}

/// Periodic Hann, `0.5 - 0.5·cos(2πl/len)` for `l = 0..len`. Unit peak,
/// vanishes at `l = 0`.
pub fn hann(len: usize) -> Vec<f64> {
    (0..len)
        .map(|l| 0.5 - 0.5 * (2.0 * PI * l as f64 / len as f64).cos())
        .collect()
}

impl WindowProfile {
    pub fn taps(self, len: usize) -> Option<Vec<f64>> {
        match self {
            WindowProfile::Hann => Some(hann(len)),
            WindowProfile::Rect => Some(vec![1.0; len]),
            WindowProfile::Custom => None,
        }
    }
}
