//! Painless nonstationary Gabor frames on finite circular signals: window
//! systems with flexible time resolution, perfect-reconstruction analysis
//! and synthesis, structured coverings with their partitions of unity, and
//! nonlinear N-term approximation.

pub mod adapt;
pub mod approx;
pub mod covering;
pub mod decomp;
pub mod error;
pub mod fft;
pub mod frame;
pub mod signal_io;
pub mod transform;
pub mod window;

pub use rustfft::num_complex::Complex64;

pub use adapt::{detect_onsets, ladder, scale_frame_schedule, OnsetParams, ScheduleEntry, WindowSchedule};
pub use approx::{
    error_curve, power_fit, redundancy, rms, sequence_norm, standard_grid, threshold_top_n,
    Approximator, ErrorCurve, ErrorPoint, PowerFit, SequenceNormParams, ThresholdOrder,
};
pub use covering::{build_bapu, check_admissible, check_weight, covering_from_system, Bapu, ModerateWeight, StructuredCovering};
pub use decomp::{decomposition_norm, equivalence_report, DecompNormParams, EquivalenceReport};
pub use error::{Error, Result};
pub use frame::{
    canonical_dual, canonical_tight, frame_bounds, frame_diagonal, make_nsgf, make_stationary_gabor,
    validate_painless, FrameBounds, FrameDiagonal, NsgfSystem, SystemKind, Window,
};
pub use signal_io::{generate, load_wav, write_wav, Signal, SyntheticKind, SyntheticSpec};
pub use transform::{analyze, synthesize, synthesize_complex, CoefficientSet};
