//! File-level stitch → analyze → report runs on a synthetic export tree.

mod common;

use std::fs;
use std::path::Path;

use common::fixture::Fixture;
use trendnet::netstat::{metrics_from_csv, PERSISTENCE_HEADER};
use trendnet::pipeline::{
    load_registry, run_analyze, run_report, run_stitch, AnalyzeOptions, ReportOptions, StitchOptions,
};
use trendnet::render::Metric;
use trendnet::series::{ymd, DateSpan};

fn stitch_opts(root: &Path, out: &Path) -> StitchOptions {
    StitchOptions {
        daily_dir: root.join("daily"),
        weekly_dir: root.join("weekly"),
        out_dir: out.to_path_buf(),
        span: DateSpan::default_analysis(),
        raw: false,
    }
}

#[test]
fn full_run_produces_expected_files() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    Fixture::planted_blocks(21).write_tree(root);
    let registry = load_registry(&root.join("registry.csv")).unwrap();

    let stitched = run_stitch(&registry, &stitch_opts(root, &root.join("stitched"))).unwrap();
    assert_eq!(stitched.written.len(), 15);
    assert!(root.join("stitched/face shield.csv").is_file());

    let mut opts = AnalyzeOptions::new(root.join("stitched"), root.join("analysis"));
    opts.registry = Some(registry);
    let summary = run_analyze(&opts).unwrap();
    assert_eq!(summary.metric_files.len(), 8);
    assert_eq!(summary.correlation_files.len(), 2);
    assert_eq!(summary.persistence_files.len(), 16);
    assert_eq!(
        summary.label_spans,
        [
            (15, DateSpan::new(ymd(2020, 3, 31), ymd(2021, 3, 16)).unwrap()),
            (30, DateSpan::new(ymd(2020, 4, 15), ymd(2021, 3, 16)).unwrap()),
        ]
    );

    let metrics = metrics_from_csv(&fs::read_to_string(root.join("analysis/metrics_w15_t0.4.csv")).unwrap()).unwrap();
    assert_eq!(metrics.len(), 351);
    let corr = fs::read_to_string(root.join("analysis/correlations_w30.csv")).unwrap();
    assert_eq!(corr.lines().count(), 1 + 336 * 105);

    let pairs = fs::read_to_string(root.join("analysis/pairs_w15_t0.8.csv")).unwrap();
    assert!(pairs.starts_with(PERSISTENCE_HEADER));
    let periods: std::collections::BTreeSet<&str> = pairs.lines().skip(1).map(|l| &l[..21]).collect();
    assert!(periods.len() <= 4);

    let written = run_report(&ReportOptions {
        metrics_dir: root.join("analysis"),
        events: None,
        metric: Metric::Density,
        out: root.join("charts/density.svg"),
    })
    .unwrap();
    assert_eq!(written.len(), 4);
    assert!(root.join("charts/density_w15.svg").is_file());
    assert!(root.join("charts/density_w30.json").is_file());
}

#[test]
fn exhaustive_persistence_lists_every_pair() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    Fixture::planted_blocks(4).write_tree(root);
    let registry = load_registry(&root.join("registry.csv")).unwrap();
    run_stitch(&registry, &stitch_opts(root, &root.join("stitched"))).unwrap();
    let mut opts = AnalyzeOptions::new(root.join("stitched"), root.join("analysis"));
    opts.windows = vec![30];
    opts.thresholds = vec![0.8];
    opts.exhaustive = true;
    opts.periods = vec![DateSpan::new(ymd(2020, 7, 1), ymd(2020, 9, 30)).unwrap()];
    run_analyze(&opts).unwrap();
    let pairs = fs::read_to_string(root.join("analysis/pairs_w30_t0.8.csv")).unwrap();
    assert_eq!(pairs.lines().count(), 1 + 105);
    let triads = fs::read_to_string(root.join("analysis/triads_w30_t0.8.csv")).unwrap();
    assert_eq!(triads.lines().count(), 1 + 455);
    let counts: Vec<usize> = pairs
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(counts.windows(2).all(|w| w[0] >= w[1]));
    assert!(counts.iter().all(|&c| c <= 92));
}

#[test]
fn error_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    Fixture::planted_blocks(8).write_tree(root);
    let registry = load_registry(&root.join("registry.csv")).unwrap();

    // Missing weekly export: I/O.
    fs::rename(root.join("weekly/flu.csv"), root.join("flu.bak")).unwrap();
    let err = run_stitch(&registry, &stitch_opts(root, &root.join("s1"))).unwrap_err();
    assert_eq!(err.exit_code(), 3);
    assert!(err.to_string().contains("flu.csv"));
    fs::rename(root.join("flu.bak"), root.join("weekly/flu.csv")).unwrap();

    // Gap between segments: validation, naming keyword and missing date.
    fs::remove_file(root.join("daily/ubo/02.csv")).unwrap();
    let err = run_stitch(&registry, &stitch_opts(root, &root.join("s2"))).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let msg = err.to_string();
    assert!(msg.contains("ubo") && msg.contains("2020-04-16"), "{msg}");
}

#[test]
fn analyze_parameter_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    Fixture::planted_blocks(9).write_tree(root);
    let registry = load_registry(&root.join("registry.csv")).unwrap();
    run_stitch(&registry, &stitch_opts(root, &root.join("stitched"))).unwrap();

    let mut opts = AnalyzeOptions::new(root.join("stitched"), root.join("a"));
    opts.windows = vec![400];
    assert_eq!(run_analyze(&opts).unwrap_err().exit_code(), 4);

    let mut opts = AnalyzeOptions::new(root.join("stitched"), root.join("a"));
    opts.thresholds = vec![1.5];
    assert_eq!(run_analyze(&opts).unwrap_err().exit_code(), 2);

    let opts = AnalyzeOptions::new(root.join("missing"), root.join("a"));
    assert_eq!(run_analyze(&opts).unwrap_err().exit_code(), 3);

    let err = run_report(&ReportOptions {
        metrics_dir: root.join("nope"),
        events: None,
        metric: Metric::Clustering,
        out: root.join("c.svg"),
    })
    .unwrap_err();
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn raw_stitch_skips_rescaling() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    Fixture::planted_blocks(10).write_tree(root);
    let registry = load_registry(&root.join("registry.csv")).unwrap();
    let mut opts = stitch_opts(root, &root.join("raw"));
    opts.raw = true;
    fs::remove_dir_all(root.join("weekly")).unwrap();
    run_stitch(&registry, &opts).unwrap();
    let cough = fs::read_to_string(root.join("raw/cough.csv")).unwrap();
    assert!(cough.lines().skip(1).all(|l| {
        let v: f64 = l.split(',').nth(1).unwrap().parse().unwrap();
        v.fract() == 0.0 && (0.0..=100.0).contains(&v)
    }));
}
