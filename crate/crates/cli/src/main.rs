mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use trendnet::pipeline::{
    default_periods, load_registry, run_analyze, run_report, run_stitch, AnalyzeOptions, PipelineError, ReportOptions,
    StitchOptions,
};
use trendnet::render::Metric;
use trendnet::series::parse_iso_date;
use trendnet::DateSpan;

use config::{split_list, Config};

#[derive(Debug, Parser)]
#[command(
    name = "trendnet",
    version,
    about = "Keyword co-movement networks from search-interest exports"
)]
struct Cli {
    /// `key = value` file; `[stitch]`, `[analyze]`, `[report]` sections are optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Assemble daily segments and rescale them by weekly interest.
    Stitch(StitchArgs),
    /// Rolling correlations, network metrics and persistence reports.
    Analyze(AnalyzeArgs),
    /// SVG charts and JSON event reports from metric files.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct StitchArgs {
    #[arg(long)]
    daily_dir: Option<PathBuf>,
    #[arg(long)]
    weekly_dir: Option<PathBuf>,
    #[arg(long)]
    registry: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Analysis span as `start:end` (default 2020-03-16:2021-03-15).
    #[arg(long)]
    span: Option<String>,
    /// Skip weekly rescaling.
    #[arg(long)]
    raw: bool,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[arg(long)]
    stitched: Option<PathBuf>,
    /// Window lengths in days, comma separated.
    #[arg(long)]
    windows: Option<String>,
    /// Edge thresholds in (0, 1), comma separated.
    #[arg(long)]
    thresholds: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Keyword order for matrices; alphabetical by file name otherwise.
    #[arg(long)]
    registry: Option<PathBuf>,
    /// Persistence period `start:end`; repeatable. Defaults to calendar quarters.
    #[arg(long = "period")]
    periods: Vec<String>,
    /// Include zero-count pairs and triads in persistence reports.
    #[arg(long)]
    exhaustive: bool,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Event CSV (`date,label,category`); bundled timeline otherwise.
    #[arg(long)]
    events: Option<PathBuf>,
    /// `density` or `clustering`.
    #[arg(long)]
    metric: Option<String>,
    /// Output `.svg` path (suffixed per window) or directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn required(value: Option<PathBuf>, config: &Config, section: &str, key: &str) -> Result<PathBuf, PipelineError> {
    value
        .or_else(|| config.path(section, key))
        .ok_or_else(|| PipelineError::BadParameter(format!("{section}: missing --{}", key.replace('_', "-"))))
}

fn parse_span(raw: &str) -> Result<DateSpan, String> {
    let (a, b) = raw
        .split_once(':')
        .ok_or_else(|| format!("`{raw}`: expected start:end"))?;
    let start = parse_iso_date(a.trim()).ok_or_else(|| format!("`{a}`: not a YYYY-MM-DD date"))?;
    let end = parse_iso_date(b.trim()).ok_or_else(|| format!("`{b}`: not a YYYY-MM-DD date"))?;
    DateSpan::new(start, end).ok_or_else(|| format!("`{raw}`: end precedes start"))
}

fn parse_list<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>, PipelineError> {
    split_list(raw)
        .into_iter()
        .map(|item| {
            item.parse()
                .map_err(|_| PipelineError::BadParameter(format!("{what}: cannot parse `{item}`")))
        })
        .collect()
}

fn cmd_stitch(args: StitchArgs, config: &Config) -> Result<(), PipelineError> {
    const S: &str = "stitch";
    let registry_path = required(args.registry, config, S, "registry")?;
    let span = match args.span.as_deref().or(config.get(S, "span")) {
        Some(raw) => parse_span(raw).map_err(|e| PipelineError::BadParameter(format!("span {e}")))?,
        None => DateSpan::default_analysis(),
    };
    let raw = args.raw || config.flag(S, "raw")?.unwrap_or(false);
    let opts = StitchOptions {
        daily_dir: required(args.daily_dir, config, S, "daily_dir")?,
        weekly_dir: if raw {
            args.weekly_dir
                .or_else(|| config.path(S, "weekly_dir"))
                .unwrap_or_default()
        } else {
            required(args.weekly_dir, config, S, "weekly_dir")?
        },
        out_dir: required(args.out, config, S, "out")?,
        span,
        raw,
    };
    let registry = load_registry(&registry_path)?;
    let summary = run_stitch(&registry, &opts)?;
    for w in &summary.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "stitched {} keywords into {}",
        summary.written.len(),
        opts.out_dir.display()
    );
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs, config: &Config) -> Result<(), PipelineError> {
    const S: &str = "analyze";
    let mut opts = AnalyzeOptions::new(
        required(args.stitched, config, S, "stitched")?,
        required(args.out, config, S, "out")?,
    );
    if let Some(raw) = args.windows.as_deref().or(config.get(S, "windows")) {
        opts.windows = parse_list(raw, "windows")?;
    }
    if let Some(raw) = args.thresholds.as_deref().or(config.get(S, "thresholds")) {
        opts.thresholds = parse_list(raw, "thresholds")?;
    }
    let period_strings: Vec<String> = if !args.periods.is_empty() {
        args.periods
    } else {
        config
            .get(S, "periods")
            .or(config.get(S, "period"))
            .map(|raw| split_list(raw).into_iter().map(str::to_string).collect())
            .unwrap_or_default()
    };
    opts.periods = if period_strings.is_empty() {
        default_periods()
    } else {
        period_strings
            .iter()
            .map(|p| parse_span(p).map_err(|e| PipelineError::BadParameter(format!("period {e}"))))
            .collect::<Result<_, _>>()?
    };
    if let Some(path) = args.registry.or_else(|| config.path(S, "registry")) {
        opts.registry = Some(load_registry(&path)?);
    }
    opts.exhaustive = args.exhaustive || config.flag(S, "exhaustive")?.unwrap_or(false);

    let summary = run_analyze(&opts)?;
    for (window, span) in &summary.label_spans {
        println!("window {window}: label dates {span}");
    }
    println!(
        "wrote {} correlation, {} metric and {} persistence files to {}",
        summary.correlation_files.len(),
        summary.metric_files.len(),
        summary.persistence_files.len(),
        opts.out_dir.display()
    );
    Ok(())
}

fn cmd_report(args: ReportArgs, config: &Config) -> Result<(), PipelineError> {
    const S: &str = "report";
    let metric = match args.metric.as_deref().or(config.get(S, "metric")) {
        Some(raw) => raw
            .parse::<Metric>()
            .map_err(|_| PipelineError::BadParameter(format!("metric `{raw}`: expected density or clustering")))?,
        None => Metric::Density,
    };
    let opts = ReportOptions {
        metrics_dir: required(args.metrics, config, S, "metrics")?,
        events: args.events.or_else(|| config.path(S, "events")),
        metric,
        out: required(args.out, config, S, "out")?,
    };
    for path in run_report(&opts)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn configure_threads() -> Result<(), PipelineError> {
    let Ok(raw) = std::env::var("TRENDNET_THREADS") else {
        return Ok(());
    };
    let threads: usize =
        raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            PipelineError::BadParameter(format!("TRENDNET_THREADS=`{raw}`: expected a positive integer"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| PipelineError::BadParameter(format!("TRENDNET_THREADS: {e}")))
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    configure_threads()?;
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Stitch(args) => cmd_stitch(args, &config),
        Command::Analyze(args) => cmd_analyze(args, &config),
        Command::Report(args) => cmd_report(args, &config),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
