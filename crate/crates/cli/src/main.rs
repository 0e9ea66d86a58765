use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};
use nsgf::signal_io::SyntheticSpec;
use nsgf_cli::{
    cmd_compare, cmd_corpus, cmd_spectrogram, cmd_validate, parse_grid, CliError, CliResult,
    ExperimentConfig, InputSpec, SpectrogramRequest, StagedOutputs,
};

#[derive(Parser)]
#[command(name = "nsgf", version, about = "Nonstationary Gabor frame approximation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Error curves, fits and spectrograms of every transform for one signal.
    Compare(Common),
    /// Averages over a directory of WAV files or a synthetic corpus.
    Corpus(Common),
    /// One spectrogram image, optionally after thresholding.
    Spectrogram {
        #[command(flatten)]
        common: Common,
        /// Index of the transform in the configuration.
        #[arg(long, default_value_t = 0)]
        transform: usize,
        /// Keep only the N largest coefficients.
        #[arg(long)]
        threshold: Option<usize>,
        /// Image width in pixels.
        #[arg(long)]
        width: Option<usize>,
    },
    /// Frame bounds, covering and painless-condition reports.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory [default: the configured one, else `nsgf_out`].
    #[arg(long)]
    out: Option<PathBuf>,
    /// WAV file or directory of WAV files.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Use the synthetic ten-tone melody of this many samples at 44.1 kHz.
    #[arg(long, conflicts_with = "input")]
    melody: Option<usize>,
    /// N grid: `standard`, values and `start:end:step` ranges separated by commas.
    #[arg(long)]
    grid: Option<String>,
    /// Threshold positive frequencies only (conjugates follow).
    #[arg(long, action = ArgAction::Set)]
    half_spectrum: Option<bool>,
    /// Seed for seeded synthetic inputs.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn config(&self) -> CliResult<ExperimentConfig> {
        let input = match (&self.input, self.melody) {
            (Some(p), _) if p.is_dir() => Some(InputSpec::Directory(p.clone())),
            (Some(p), _) => Some(InputSpec::Wav(p.clone())),
            (None, Some(len)) => Some(InputSpec::Synthetic(SyntheticSpec::melody(len, 44_100))),
            (None, None) => None,
        };
        let mut cfg = match (&self.config, input.clone()) {
            (Some(path), _) => ExperimentConfig::load(path)?,
            (None, Some(input)) => ExperimentConfig::new(input),
            (None, None) => {
                return Err(CliError::Validation(
                    "no input: give --config, --input or --melody".into(),
                ))
            }
        };
        if let Some(input) = input {
            cfg.input = input;
        }
        if let Some(grid) = &self.grid {
            cfg.n_grid = parse_grid(grid)?;
        }
        if let Some(h) = self.half_spectrum {
            cfg.half_spectrum = h;
        }
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        Ok(cfg.seeded())
    }

    fn out_dir(&self, cfg: &ExperimentConfig) -> PathBuf {
        self.out
            .clone()
            .or_else(|| cfg.outputs.clone())
            .unwrap_or_else(|| PathBuf::from("nsgf_out"))
    }
}

fn commit(outputs: &StagedOutputs, dir: &std::path::Path) -> CliResult<()> {
    for path in outputs.commit(dir)? {
        log::info!("wrote {}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Compare(common) => {
            let cfg = common.config()?;
            let (report, out) = cmd_compare(&cfg)?;
            commit(&out, &common.out_dir(&cfg))?;
            for t in &report.transforms {
                println!(
                    "{:<28} redundancy {:.4}  sum E {:.4}  alpha {}  N(E<{}) {}",
                    t.transform,
                    t.redundancy,
                    t.error_sum,
                    t.fit.map(|f| format!("{:.4}", f.alpha)).unwrap_or_else(|| "-".into()),
                    report.target_error,
                    t.n_below_target.map(|n| n.to_string()).unwrap_or_else(|| "-".into()),
                );
            }
        }
        Command::Corpus(common) => {
            let cfg = common.config()?;
            let (report, out) = cmd_corpus(&cfg)?;
            commit(&out, &common.out_dir(&cfg))?;
            println!(
                "{} file(s) processed, {} skipped",
                report.files_processed,
                report.skipped.len()
            );
            for c in &report.table {
                println!(
                    "{:<28} redundancy {:.4}  sum E {:.4}  alpha {}",
                    c.transform,
                    c.average_redundancy,
                    c.average_error_sum,
                    c.average_alpha.map(|a| format!("{a:.4}")).unwrap_or_else(|| "-".into())
                );
            }
        }
        Command::Spectrogram {
            common,
            transform,
            threshold,
            width,
        } => {
            let mut cfg = common.config()?;
            if let Some(w) = width {
                cfg.spectrogram_width = w;
            }
            let (_, out) = cmd_spectrogram(&cfg, &SpectrogramRequest { transform, threshold })?;
            commit(&out, &common.out_dir(&cfg))?;
        }
        Command::Validate(common) => {
            let cfg = common.config()?;
            let (report, out) = cmd_validate(&cfg)?;
            commit(&out, &common.out_dir(&cfg))?;
            for s in &report.systems {
                println!(
                    "{:<28} {}  A {:.6e}  B {:.6e}",
                    s.transform,
                    if s.ok { "ok" } else { "FAILED" },
                    s.frame_bounds.lower,
                    s.frame_bounds.upper
                );
            }
            if !report.ok {
                return Err(CliError::Validation("some systems failed validation".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
