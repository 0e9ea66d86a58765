//! Experiment driver for painless nonstationary Gabor frames: compares
//! stationary and adaptive expansions of a signal, aggregates corpus
//! tables, renders spectrograms and validates systems.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod render;

pub use commands::{
    cmd_compare, cmd_corpus, cmd_spectrogram, cmd_validate, CompareReport, CorpusReport,
    SpectrogramRequest, ValidationReport,
};
pub use config::{parse_grid, ExperimentConfig, InputSpec, TransformSpec};
pub use error::{CliError, CliResult};
pub use output::StagedOutputs;
