//! The four experiment commands. Each returns its report together with the
//! staged output files; nothing touches the file system except input
//! loading.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nsgf::approx::{redundancy, Approximator, ErrorCurve, PowerFit};
use nsgf::covering::{covering_from_system, covering_report, CoveringReport, DEFAULT_C_STAR, DEFAULT_PLATEAU};
use nsgf::frame::{frame_bounds, frame_diagonal, validate_painless, FrameBounds, NsgfSystem, PainlessReport};
use nsgf::signal_io::{generate, load_wav};
use nsgf::Signal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, InputSpec, TransformSpec};
use crate::error::{CliError, CliResult};
use crate::output::StagedOutputs;
use crate::render::render;

/// A named input signal, already truncated to the usable length.
#[derive(Clone, Debug)]
pub struct NamedSignal {
    pub name: String,
    pub signal: Signal,
    pub original_length: usize,
}

fn prepare(cfg: &ExperimentConfig, name: String, signal: Signal) -> CliResult<NamedSignal> {
    let original_length = signal.len();
    let usable = cfg.usable_length(original_length);
    if usable == 0 {
        return Err(CliError::Validation(format!(
            "{name}: {original_length} samples are too few for the configured hops"
        )));
    }
    if usable < original_length {
        log::info!("{name}: using the first {usable} of {original_length} samples");
    }
    Ok(NamedSignal {
        name,
        signal: signal.truncated(usable)?,
        original_length,
    })
}

/// The single signal of a `wav` or `synthetic` input.
pub fn load_single(cfg: &ExperimentConfig) -> CliResult<NamedSignal> {
    let (name, signal) = match &cfg.input {
        InputSpec::Wav(path) => (file_name(path), load_wav_at(path)?),
        InputSpec::Synthetic(spec) => ("synthetic".to_string(), generate(spec)?),
        _ => {
            return Err(CliError::Validation(
                "this command needs a single wav or synthetic input".into(),
            ))
        }
    };
    prepare(cfg, name, signal)
}

/// `load_wav` with the path attached to I/O errors.
fn load_wav_at(path: &Path) -> CliResult<Signal> {
    load_wav(path).map_err(|e| match e {
        nsgf::Error::Io(io) => CliError::io(path, io),
        other => other.into(),
    })
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn list_wavs(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        let is_wav = path
            .extension()
            .is_some_and(|ext| ext.eq_ignore_ascii_case("wav"));
        if is_wav && path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Grid restricted to the available candidates, plus the dropped values.
fn usable_grid(grid: &[usize], capacity: usize) -> (Vec<usize>, Vec<usize>) {
    grid.iter().partition(|&&n| n <= capacity)
}

// ---------------------------------------------------------------- compare

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformSummary {
    pub transform: String,
    pub spec: TransformSpec,
    pub windows: usize,
    pub total_coefficients: usize,
    /// Candidates available to thresholding (half or full spectrum).
    pub capacity: usize,
    pub redundancy: f64,
    pub frame_bounds: FrameBounds,
    pub error_sum: f64,
    pub fit: Option<PowerFit>,
    pub curve_nonincreasing: bool,
    /// Smallest `N` with `E(N) < target_error`.
    pub n_below_target: Option<usize>,
    /// `E(capacity)`: the reconstruction error with every candidate kept.
    pub reconstruction_error: f64,
    pub dropped_grid_points: Vec<usize>,
    pub thresholded_at: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub input: String,
    pub signal_length: usize,
    pub original_length: usize,
    pub sample_rate: u32,
    pub half_spectrum: bool,
    pub target_error: f64,
    pub transforms: Vec<TransformSummary>,
    #[serde(skip)]
    pub curves: Vec<ErrorCurve>,
}

fn curve_for(
    approx: &Approximator,
    grid: &[usize],
    label: &str,
) -> CliResult<(ErrorCurve, Vec<usize>)> {
    let (kept, dropped) = usable_grid(grid, approx.capacity());
    if kept.is_empty() {
        return Err(CliError::Validation(format!(
            "{label}: no grid value within the {} candidate coefficients",
            approx.capacity()
        )));
    }
    if !dropped.is_empty() {
        log::warn!(
            "{label}: {} grid value(s) above the {} candidates dropped",
            dropped.len(),
            approx.capacity()
        );
    }
    Ok((approx.error_curve(&kept)?, dropped))
}

pub fn cmd_compare(cfg: &ExperimentConfig) -> CliResult<(CompareReport, StagedOutputs)> {
    cfg.validate()?;
    let input = load_single(cfg)?;
    let f = &input.signal;
    let mut out = StagedOutputs::new();
    let mut summaries = Vec::new();
    let mut curves = Vec::new();
    for spec in &cfg.transforms {
        let label = spec.label();
        log::info!("{label}: building system");
        let system = spec.build(f)?;
        let approx = Approximator::new(f, &system, cfg.half_spectrum)?;
        let (curve, dropped) = curve_for(&approx, &cfg.n_grid, &label)?;
        let n_below = approx.min_terms_below(cfg.target_error)?;
        let reconstruction_error = approx.error(approx.capacity())?;
        let thresholded_at = n_below.unwrap_or(curve.points[curve.points.len() - 1].n);
        let summary = TransformSummary {
            transform: label.clone(),
            spec: spec.clone(),
            windows: system.len(),
            total_coefficients: system.total_coefficients(),
            capacity: approx.capacity(),
            redundancy: redundancy(&system),
            frame_bounds: frame_bounds(&frame_diagonal(&system)),
            error_sum: curve.error_sum(),
            fit: curve.fit,
            curve_nonincreasing: curve.is_nonincreasing(),
            n_below_target: n_below,
            reconstruction_error,
            dropped_grid_points: dropped,
            thresholded_at,
        };
        log::info!(
            "{label}: redundancy {:.4}, E<{} at N={:?}",
            summary.redundancy,
            cfg.target_error,
            n_below
        );
        if cfg.emit.csv {
            let mut bytes = Vec::new();
            curve.write_csv(&mut bytes).map_err(|e| CliError::io(Path::new(&label), e))?;
            out.add(format!("{label}_curve.csv"), bytes);
        }
        if cfg.emit.json {
            out.add_json(format!("{label}_fit.json"), &summary)?;
        }
        if cfg.emit.pgm {
            let original = render(approx.coefficients(), cfg.spectrogram_width, None);
            let thresholded = render(
                &approx.thresholded(thresholded_at)?,
                cfg.spectrogram_width,
                Some(thresholded_at),
            );
            for (suffix, image) in [("original", original), ("thresholded", thresholded)] {
                out.add(format!("{label}_{suffix}.pgm"), image.to_pgm());
                out.add_json(format!("{label}_{suffix}.json"), &image.meta)?;
            }
        }
        summaries.push(summary);
        curves.push(curve);
    }
    let report = CompareReport {
        input: input.name.clone(),
        signal_length: f.len(),
        original_length: input.original_length,
        sample_rate: f.sample_rate(),
        half_spectrum: cfg.half_spectrum,
        target_error: cfg.target_error,
        transforms: summaries,
        curves,
    };
    if cfg.emit.csv {
        out.add("summary.csv", compare_csv(&report).into_bytes());
    }
    if cfg.emit.json {
        out.add_json("summary.json", &report)?;
    }
    Ok((report, out))
}

fn compare_csv(report: &CompareReport) -> String {
    let mut s = String::from(
        "transform,windows,total_coefficients,capacity,redundancy,error_sum,C,alpha,n_below_target,reconstruction_error,dropped_grid_points\n",
    );
    for t in &report.transforms {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            t.transform,
            t.windows,
            t.total_coefficients,
            t.capacity,
            fmt_f64(t.redundancy),
            fmt_f64(t.error_sum),
            fmt_opt(t.fit.map(|f| f.c)),
            fmt_opt(t.fit.map(|f| f.alpha)),
            t.n_below_target.map(|n| n.to_string()).unwrap_or_default(),
            fmt_f64(t.reconstruction_error),
            t.dropped_grid_points.len(),
        );
    }
    s
}

// ----------------------------------------------------------------- corpus

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileRow {
    pub file: String,
    pub transform: String,
    pub length: usize,
    pub redundancy: f64,
    pub error_sum: f64,
    pub fit: Option<PowerFit>,
    pub grid_points: usize,
    pub nonincreasing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedFile {
    pub file: String,
    pub reason: String,
}

/// Averages over the processed files for one transform; `alpha` averages
/// only the files with a fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableColumn {
    pub transform: String,
    pub files: usize,
    pub average_redundancy: f64,
    pub average_error_sum: f64,
    pub average_alpha: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub files_processed: usize,
    pub skipped: Vec<SkippedFile>,
    pub rows: Vec<FileRow>,
    pub table: Vec<TableColumn>,
    pub grid: Vec<usize>,
    pub half_spectrum: bool,
}

enum CorpusItem {
    File(PathBuf),
    Synthetic(usize, nsgf::SyntheticSpec),
}

impl CorpusItem {
    fn name(&self) -> String {
        match self {
            CorpusItem::File(p) => file_name(p),
            CorpusItem::Synthetic(i, _) => format!("synthetic_{i:03}"),
        }
    }

    fn load(&self) -> CliResult<Signal> {
        match self {
            CorpusItem::File(p) => load_wav_at(p),
            CorpusItem::Synthetic(_, spec) => Ok(generate(spec)?),
        }
    }
}

fn corpus_items(cfg: &ExperimentConfig) -> CliResult<Vec<CorpusItem>> {
    let items: Vec<CorpusItem> = match &cfg.input {
        InputSpec::Directory(dir) => list_wavs(dir)?.into_iter().map(CorpusItem::File).collect(),
        InputSpec::Wav(path) => vec![CorpusItem::File(path.clone())],
        InputSpec::SyntheticCorpus(list) => list
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, s)| CorpusItem::Synthetic(i, s))
            .collect(),
        InputSpec::Synthetic(spec) => vec![CorpusItem::Synthetic(0, spec.clone())],
    };
    if items.is_empty() {
        let what = match &cfg.input {
            InputSpec::Directory(dir) => format!("no .wav files in {}", dir.display()),
            _ => "no signals listed".into(),
        };
        return Err(CliError::EmptyCorpus(what));
    }
    Ok(items)
}

fn process_file(cfg: &ExperimentConfig, item: &CorpusItem) -> CliResult<Vec<FileRow>> {
    let input = prepare(cfg, item.name(), item.load()?)?;
    let mut rows = Vec::with_capacity(cfg.transforms.len());
    for spec in &cfg.transforms {
        let label = spec.label();
        let system = spec.build(&input.signal)?;
        let approx = Approximator::new(&input.signal, &system, cfg.half_spectrum)?;
        let (curve, _) = curve_for(&approx, &cfg.n_grid, &format!("{}/{label}", input.name))?;
        rows.push(FileRow {
            file: input.name.clone(),
            transform: label,
            length: input.signal.len(),
            redundancy: redundancy(&system),
            error_sum: curve.error_sum(),
            fit: curve.fit,
            grid_points: curve.points.len(),
            nonincreasing: curve.is_nonincreasing(),
        });
    }
    Ok(rows)
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

fn corpus_table(cfg: &ExperimentConfig, rows: &[FileRow]) -> Vec<TableColumn> {
    cfg.transforms
        .iter()
        .map(|spec| {
            let label = spec.label();
            let mine: Vec<&FileRow> = rows.iter().filter(|r| r.transform == label).collect();
            TableColumn {
                files: mine.len(),
                average_redundancy: mean(mine.iter().map(|r| r.redundancy)).unwrap_or(f64::NAN),
                average_error_sum: mean(mine.iter().map(|r| r.error_sum)).unwrap_or(f64::NAN),
                average_alpha: mean(mine.iter().filter_map(|r| r.fit.map(|f| f.alpha))),
                transform: label,
            }
        })
        .collect()
}

pub fn cmd_corpus(cfg: &ExperimentConfig) -> CliResult<(CorpusReport, StagedOutputs)> {
    cfg.validate()?;
    let items = corpus_items(cfg)?;
    log::info!("corpus of {} signal(s)", items.len());
    // results are collected in item order, so thread count cannot change them
    let results: Vec<CliResult<Vec<FileRow>>> =
        items.par_iter().map(|item| process_file(cfg, item)).collect();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let mut processed = 0;
    for (item, result) in items.iter().zip(results) {
        match result {
            Ok(r) => {
                processed += 1;
                rows.extend(r);
            }
            Err(e) => {
                log::warn!("skipping {}: {e}", item.name());
                skipped.push(SkippedFile {
                    file: item.name(),
                    reason: e.to_string(),
                });
            }
        }
    }
    if processed == 0 {
        return Err(CliError::EmptyCorpus(format!(
            "all {} signal(s) were skipped",
            items.len()
        )));
    }
    let report = CorpusReport {
        files_processed: processed,
        skipped,
        table: corpus_table(cfg, &rows),
        rows,
        grid: cfg.n_grid.clone(),
        half_spectrum: cfg.half_spectrum,
    };
    let mut out = StagedOutputs::new();
    if cfg.emit.csv {
        out.add("corpus_files.csv", corpus_files_csv(&report).into_bytes());
        out.add("corpus_table.csv", corpus_table_csv(&report).into_bytes());
    }
    if cfg.emit.json {
        out.add_json("corpus_report.json", &report)?;
    }
    Ok((report, out))
}

fn corpus_files_csv(report: &CorpusReport) -> String {
    let mut s = String::from("file,transform,length,redundancy,error_sum,C,alpha,grid_points\n");
    for r in &report.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.file,
            r.transform,
            r.length,
            fmt_f64(r.redundancy),
            fmt_f64(r.error_sum),
            fmt_opt(r.fit.map(|f| f.c)),
            fmt_opt(r.fit.map(|f| f.alpha)),
            r.grid_points
        );
    }
    s
}

/// One row per quantity, one column per transform.
fn corpus_table_csv(report: &CorpusReport) -> String {
    let mut s = String::from("quantity");
    for c in &report.table {
        let _ = write!(s, ",{}", c.transform);
    }
    s.push('\n');
    let rows: [(&str, fn(&TableColumn) -> Option<f64>); 3] = [
        ("average_redundancy", |c| Some(c.average_redundancy)),
        ("average_error_sum", |c| Some(c.average_error_sum)),
        ("average_alpha", |c| c.average_alpha),
    ];
    for (name, get) in rows {
        s.push_str(name);
        for c in &report.table {
            let _ = write!(s, ",{}", fmt_opt(get(c)));
        }
        s.push('\n');
    }
    s
}

// ------------------------------------------------------------ spectrogram

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrogramRequest {
    /// Index into the configured transforms.
    pub transform: usize,
    /// Keep only the `N` largest candidates before rendering.
    pub threshold: Option<usize>,
}

pub fn cmd_spectrogram(
    cfg: &ExperimentConfig,
    request: &SpectrogramRequest,
) -> CliResult<(crate::render::Spectrogram, StagedOutputs)> {
    cfg.validate()?;
    let spec = cfg.transforms.get(request.transform).ok_or_else(|| {
        CliError::Validation(format!(
            "transform index {} out of range (have {})",
            request.transform,
            cfg.transforms.len()
        ))
    })?;
    let input = load_single(cfg)?;
    let system = spec.build(&input.signal)?;
    let coeffs = nsgf::analyze(&input.signal, &system)?;
    let (coeffs, name) = match request.threshold {
        None => (coeffs, format!("{}_spectrogram", spec.label())),
        Some(n) => (
            nsgf::threshold_top_n(&coeffs, n, cfg.half_spectrum)?,
            format!("{}_spectrogram_n{n}", spec.label()),
        ),
    };
    let image = render(&coeffs, cfg.spectrogram_width, request.threshold);
    let mut out = StagedOutputs::new();
    out.add(format!("{name}.pgm"), image.to_pgm());
    out.add_json(format!("{name}.json"), &image.meta)?;
    Ok((image, out))
}

// --------------------------------------------------------------- validate

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemValidation {
    pub transform: String,
    pub windows: usize,
    pub redundancy: f64,
    pub frame_bounds: FrameBounds,
    pub covering: CoveringReport,
    pub painless: PainlessReport,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub signal_length: usize,
    pub systems: Vec<SystemValidation>,
    pub ok: bool,
}

fn validate_system(label: String, system: &NsgfSystem) -> CliResult<SystemValidation> {
    let bounds = frame_bounds(&frame_diagonal(system));
    let cov = covering_from_system(system, DEFAULT_C_STAR)?;
    let covering = covering_report(&cov, DEFAULT_PLATEAU);
    let painless = validate_painless(system, &cov);
    let ok = bounds.is_frame && !bounds.near_singular && covering.errors.is_empty() && painless.all_ok();
    Ok(SystemValidation {
        transform: label,
        windows: system.len(),
        redundancy: redundancy(system),
        frame_bounds: bounds,
        covering,
        painless,
        ok,
    })
}

/// Frame, covering and painless reports for every configured transform.
/// Failed checks are reported, not raised; the caller decides the exit
/// status from `ok`.
pub fn cmd_validate(cfg: &ExperimentConfig) -> CliResult<(ValidationReport, StagedOutputs)> {
    cfg.validate()?;
    let input = load_single(cfg)?;
    let systems = cfg
        .transforms
        .iter()
        .map(|spec| validate_system(spec.label(), &spec.build(&input.signal)?))
        .collect::<CliResult<Vec<_>>>()?;
    let report = ValidationReport {
        signal_length: input.signal.len(),
        ok: systems.iter().all(|s| s.ok),
        systems,
    };
    let mut out = StagedOutputs::new();
    out.add_json("validation.json", &report)?;
    Ok((report, out))
}
