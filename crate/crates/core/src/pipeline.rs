//! File-level orchestration: stitch exports, analyze stitched series, render reports.
//!
//! Directory layout:
//!
//! ```text
//! daily/<keyword>/<n>.csv    one daily export per segment
//! weekly/<keyword>.csv       year-long weekly export
//! stitched/<keyword>.csv     output of `run_stitch`
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::correlate::{rolling_correlation, to_long_csv, CorrelationError, CorrelationFrame};
use crate::ingest::{assemble_daily, parse_daily_segment, parse_weekly, DailySegment};
use crate::netstat::{
    metrics_from_csv, metrics_to_csv, pair_persistence, persistence_rows, threshold_adjacency, triad_persistence,
    GraphFrame, MetricPoint, NetstatError, PERSISTENCE_HEADER,
};
use crate::registry::KeywordRegistry;
use crate::render::{render_json_report, render_metric_chart, Metric};
use crate::series::{parse_iso_date, ymd, DailySeries, DateSpan, Scale};
use crate::stitch::stitch;
use crate::timeline::{default_events, load_events, EventRecord};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {message}")]
    Validation { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("{path}: {message}")]
    InsufficientData { path: PathBuf, message: String },
}

impl PipelineError {
    /// Process exit status: 2 validation, 3 I/O, 4 insufficient data.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Validation { .. } | PipelineError::BadParameter(_) => 2,
            PipelineError::Io { .. } => 3,
            PipelineError::InsufficientData { .. } => 4,
        }
    }

    fn validation(path: &Path, message: impl ToString) -> Self {
        PipelineError::Validation {
            path: path.to_path_buf(),
            message: message.to_string(),
        }
    }
}

fn read(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    fs::write(path, contents).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<(), PipelineError> {
    fs::create_dir_all(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Regular files in `dir` with extension `ext`, sorted by path.
fn list_files(dir: &Path, ext: &str) -> Result<Vec<PathBuf>, PipelineError> {
    let io = |source| PipelineError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == ext) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

pub fn load_registry(path: &Path) -> Result<KeywordRegistry, PipelineError> {
    KeywordRegistry::from_csv(&read(path)?).map_err(|e| PipelineError::validation(path, e))
}

#[derive(Debug, Clone)]
pub struct StitchOptions {
    pub daily_dir: PathBuf,
    pub weekly_dir: PathBuf,
    pub out_dir: PathBuf,
    pub span: DateSpan,
    /// Write the assembled series without weekly rescaling.
    pub raw: bool,
}

#[derive(Debug, Clone, Default)]
pub struct StitchSummary {
    pub written: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

struct StitchedKeyword {
    series: DailySeries<f64>,
    warnings: Vec<String>,
}

fn stitch_keyword(keyword: &str, opts: &StitchOptions) -> Result<StitchedKeyword, PipelineError> {
    let dir = opts.daily_dir.join(keyword);
    let files = list_files(&dir, "csv")?;
    if files.is_empty() {
        return Err(PipelineError::validation(&dir, format!("{keyword}: no daily segments")));
    }
    let mut warnings = Vec::new();
    let segments = files
        .iter()
        .map(|path| {
            let seg: DailySegment<f64> =
                parse_daily_segment(&read(path)?, keyword).map_err(|e| PipelineError::validation(path, e))?;
            if let Some(w) = seg.normalization_warning() {
                warnings.push(format!("{}: {w}", path.display()));
            }
            Ok(seg)
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;
    let daily = assemble_daily(segments, opts.span).map_err(|e| PipelineError::validation(&dir, e))?;
    if opts.raw {
        return Ok(StitchedKeyword {
            series: daily,
            warnings,
        });
    }

    let weekly_path = opts.weekly_dir.join(format!("{keyword}.csv"));
    let weekly = parse_weekly(&read(&weekly_path)?, keyword).map_err(|e| PipelineError::validation(&weekly_path, e))?;
    let (series, _) = stitch(&daily, &weekly).map_err(|e| PipelineError::validation(&weekly_path, e))?;
    Ok(StitchedKeyword { series, warnings })
}

/// Stitches every registry keyword and writes `<out_dir>/<keyword>.csv`.
pub fn run_stitch(registry: &KeywordRegistry, opts: &StitchOptions) -> Result<StitchSummary, PipelineError> {
    if registry.is_empty() {
        return Err(PipelineError::BadParameter("registry has no keywords".into()));
    }
    let keywords: Vec<&str> = registry.keywords().collect();
    let results: Vec<Result<StitchedKeyword, PipelineError>> =
        keywords.par_iter().map(|k| stitch_keyword(k, opts)).collect();

    let mut summary = StitchSummary::default();
    let mut stitched = Vec::with_capacity(results.len());
    for result in results {
        let k = result?;
        summary.warnings.extend(k.warnings);
        stitched.push(k.series);
    }
    create_dir(&opts.out_dir)?;
    for series in &stitched {
        let path = opts.out_dir.join(format!("{}.csv", series.keyword()));
        write(&path, &series.to_csv())?;
        summary.written.push(path);
    }
    Ok(summary)
}

/// Reads a `date,value` file written by [`run_stitch`].
pub fn parse_series_csv(raw: &str, keyword: &str, scale: Scale) -> Result<DailySeries<f64>, String> {
    let mut start = None;
    let mut values = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        let mut fields = line.split(',');
        let Some(date) = fields.next().and_then(parse_iso_date) else {
            continue;
        };
        let raw_value = fields.next().unwrap_or("").trim();
        let value: f64 = raw_value
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite() && *v >= 0.0)
            .ok_or_else(|| format!("line {}: bad value `{raw_value}`", i + 1))?;
        let start = *start.get_or_insert(date);
        let expected = crate::series::add_days(start, values.len() as u64);
        if date != expected {
            return Err(format!("line {}: expected {expected}, found {date}", i + 1));
        }
        values.push(value);
    }
    match start {
        Some(start) => Ok(DailySeries::new(keyword, start, values, scale)),
        None => Err("no data rows".into()),
    }
}

/// The four quarters April 2020 to March 2021.
pub fn default_periods() -> Vec<DateSpan> {
    vec![
        DateSpan {
            start: ymd(2020, 4, 1),
            end: ymd(2020, 6, 30),
        },
        DateSpan {
            start: ymd(2020, 7, 1),
            end: ymd(2020, 9, 30),
        },
        DateSpan {
            start: ymd(2020, 10, 1),
            end: ymd(2020, 12, 31),
        },
        DateSpan {
            start: ymd(2021, 1, 1),
            end: ymd(2021, 3, 31),
        },
    ]
}

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub stitched_dir: PathBuf,
    pub out_dir: PathBuf,
    pub windows: Vec<usize>,
    pub thresholds: Vec<f64>,
    pub periods: Vec<DateSpan>,
    /// Fixes keyword order; otherwise files are taken alphabetically.
    pub registry: Option<KeywordRegistry>,
    /// List zero-count pairs and triads in persistence reports.
    pub exhaustive: bool,
}

impl AnalyzeOptions {
    pub fn new(stitched_dir: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            stitched_dir: stitched_dir.into(),
            out_dir: out_dir.into(),
            windows: vec![15, 30],
            thresholds: vec![0.4, 0.5, 0.6, 0.8],
            periods: default_periods(),
            registry: None,
            exhaustive: false,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct AnalyzeSummary {
    pub correlation_files: Vec<PathBuf>,
    pub metric_files: Vec<PathBuf>,
    pub persistence_files: Vec<PathBuf>,
    /// Label-date span per window.
    pub label_spans: Vec<(usize, DateSpan)>,
}

fn load_stitched(opts: &AnalyzeOptions) -> Result<Vec<DailySeries<f64>>, PipelineError> {
    let paths: Vec<(String, PathBuf)> = match &opts.registry {
        Some(registry) => registry
            .keywords()
            .map(|k| (k.to_string(), opts.stitched_dir.join(format!("{k}.csv"))))
            .collect(),
        None => list_files(&opts.stitched_dir, "csv")?
            .into_iter()
            .map(|p| {
                let k = p
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                (k, p)
            })
            .collect(),
    };
    if paths.is_empty() {
        return Err(PipelineError::validation(
            &opts.stitched_dir,
            "no stitched series found",
        ));
    }
    paths
        .iter()
        .map(|(k, p)| parse_series_csv(&read(p)?, k, Scale::Rescaled).map_err(|e| PipelineError::validation(p, e)))
        .collect()
}

fn validate_parameters(opts: &AnalyzeOptions) -> Result<(), PipelineError> {
    if opts.windows.is_empty() || opts.thresholds.is_empty() {
        return Err(PipelineError::BadParameter(
            "need at least one window and one threshold".into(),
        ));
    }
    if let Some(w) = opts.windows.iter().find(|&&w| w < 2) {
        return Err(PipelineError::BadParameter(format!(
            "window {w} is shorter than 2 days"
        )));
    }
    if let Some(t) = opts.thresholds.iter().find(|&&t| !(t > 0.0 && t < 1.0)) {
        return Err(PipelineError::BadParameter(format!("threshold {t} outside (0, 1)")));
    }
    Ok(())
}

pub fn metrics_file_name(window: usize, threshold: f64) -> String {
    format!("metrics_w{window}_t{threshold}.csv")
}

/// Rolling correlations, per-threshold metrics and persistence reports.
pub fn run_analyze(opts: &AnalyzeOptions) -> Result<AnalyzeSummary, PipelineError> {
    validate_parameters(opts)?;
    let series = load_stitched(opts)?;
    let span = series[0].span();
    if let Some(s) = series.iter().find(|s| s.span() != span) {
        return Err(PipelineError::validation(
            &opts.stitched_dir.join(format!("{}.csv", s.keyword())),
            format!("spans {} but `{}` spans {span}", s.span(), series[0].keyword()),
        ));
    }
    let keywords: Vec<String> = series.iter().map(|s| s.keyword().to_string()).collect();
    create_dir(&opts.out_dir)?;

    let mut summary = AnalyzeSummary::default();
    for &window in &opts.windows {
        let frames = rolling_correlation(&series, window, span).map_err(|e| match e {
            CorrelationError::WindowTooLong { .. } => PipelineError::InsufficientData {
                path: opts.stitched_dir.clone(),
                message: e.to_string(),
            },
            other => PipelineError::validation(&opts.stitched_dir, other),
        })?;
        let label_span = DateSpan {
            start: frames[0].label_date,
            end: frames[frames.len() - 1].label_date,
        };
        summary.label_spans.push((window, label_span));

        let path = opts.out_dir.join(format!("correlations_w{window}.csv"));
        write(&path, &to_long_csv(&keywords, &frames))?;
        summary.correlation_files.push(path);

        for &threshold in &opts.thresholds {
            let (metric_path, persistence_paths) =
                analyze_threshold(opts, &keywords, &frames, window, threshold, label_span)?;
            summary.metric_files.push(metric_path);
            summary.persistence_files.extend(persistence_paths);
        }
    }
    Ok(summary)
}

fn analyze_threshold(
    opts: &AnalyzeOptions,
    keywords: &[String],
    frames: &[CorrelationFrame<f64>],
    window: usize,
    threshold: f64,
    label_span: DateSpan,
) -> Result<(PathBuf, Vec<PathBuf>), PipelineError> {
    let bad = |e: NetstatError| PipelineError::BadParameter(e.to_string());
    let graphs: Vec<GraphFrame> = frames
        .par_iter()
        .map(|f| threshold_adjacency(f, threshold))
        .collect::<Result<_, _>>()
        .map_err(bad)?;
    let points: Vec<MetricPoint> = graphs.par_iter().map(|g| MetricPoint::from_graph(g, window)).collect();
    let metric_path = opts.out_dir.join(metrics_file_name(window, threshold));
    write(&metric_path, &metrics_to_csv(&points))?;

    let mut pairs = format!("{PERSISTENCE_HEADER}\n");
    let mut triads = pairs.clone();
    for period in opts.periods.iter().filter_map(|p| p.intersect(&label_span)) {
        let p = pair_persistence(&graphs, keywords, period, opts.exhaustive).map_err(bad)?;
        pairs.push_str(&persistence_rows(period, threshold, &p));
        let t = triad_persistence(&graphs, keywords, period, opts.exhaustive).map_err(bad)?;
        triads.push_str(&persistence_rows(period, threshold, &t));
    }
    let pairs_path = opts.out_dir.join(format!("pairs_w{window}_t{threshold}.csv"));
    let triads_path = opts.out_dir.join(format!("triads_w{window}_t{threshold}.csv"));
    write(&pairs_path, &pairs)?;
    write(&triads_path, &triads)?;
    Ok((metric_path, vec![pairs_path, triads_path]))
}

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub metrics_dir: PathBuf,
    /// Bundled timeline when `None`.
    pub events: Option<PathBuf>,
    pub metric: Metric,
    /// An `.svg` path gets `_w<window>` inserted before the extension;
    /// anything else is treated as a directory.
    pub out: PathBuf,
}

/// Paths of the chart and JSON report for one window size.
pub fn report_paths(out: &Path, metric: Metric, window: usize) -> (PathBuf, PathBuf) {
    let is_svg = out.extension().is_some_and(|e| e.eq_ignore_ascii_case("svg"));
    let (dir, stem) = if is_svg {
        let stem = out
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        (out.parent().map(Path::to_path_buf).unwrap_or_default(), stem)
    } else {
        (out.to_path_buf(), metric.name().to_string())
    };
    (
        dir.join(format!("{stem}_w{window}.svg")),
        dir.join(format!("{stem}_w{window}.json")),
    )
}

pub fn load_event_file(path: Option<&Path>) -> Result<Vec<EventRecord>, PipelineError> {
    match path {
        Some(path) => load_events(&read(path)?).map_err(|e| PipelineError::validation(path, e)),
        None => Ok(default_events()),
    }
}

/// One SVG chart and JSON report per window size found in `metrics_dir`.
pub fn run_report(opts: &ReportOptions) -> Result<Vec<PathBuf>, PipelineError> {
    let events = load_event_file(opts.events.as_deref())?;
    let files: Vec<PathBuf> = list_files(&opts.metrics_dir, "csv")?
        .into_iter()
        .filter(|p| {
            p.file_name()
                .is_some_and(|n| n.to_string_lossy().starts_with("metrics_"))
        })
        .collect();
    if files.is_empty() {
        return Err(PipelineError::validation(&opts.metrics_dir, "no metrics_*.csv files"));
    }
    let mut points = Vec::new();
    for path in &files {
        points.extend(metrics_from_csv(&read(path)?).map_err(|e| PipelineError::validation(path, e))?);
    }
    let mut windows: Vec<usize> = points.iter().map(|p| p.window_days).collect();
    windows.sort_unstable();
    windows.dedup();

    let mut written = Vec::new();
    for window in windows {
        let subset: Vec<MetricPoint> = points.iter().filter(|p| p.window_days == window).cloned().collect();
        let (svg_path, json_path) = report_paths(&opts.out, opts.metric, window);
        let svg = render_metric_chart(&subset, &events, opts.metric)
            .map_err(|e| PipelineError::validation(&opts.metrics_dir, e))?;
        let json = render_json_report(&subset, &events, opts.metric)
            .map_err(|e| PipelineError::validation(&opts.metrics_dir, e))?;
        write(&svg_path, &svg)?;
        write(&json_path, &json)?;
        written.push(svg_path);
        written.push(json_path);
    }
    Ok(written)
}
