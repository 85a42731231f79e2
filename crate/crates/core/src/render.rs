//! SVG line charts of metric time series and JSON reports.

use std::fmt::Write as _;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::Serialize;
use thiserror::Error;

use crate::netstat::MetricPoint;
use crate::series::ymd;
use crate::timeline::{join_events, EventJoin, EventRecord};

pub const WIDTH: f64 = 1200.0;
pub const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 1040.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 440.0;

/// Line colours by ascending threshold.
pub const PALETTE: [&str; 4] = ["#1f77b4", "#2ca02c", "#d62728", "#9467bd"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenderError {
    #[error("no metric points to plot")]
    EmptySeries,
    #[error("metric points mix window sizes {0} and {1}")]
    MixedWindows(usize, usize),
    #[error("unknown metric `{0}` (expected density or clustering)")]
    UnknownMetric(String),
    #[error("JSON encoding failed: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Density,
    /// Global clustering coefficient (transitivity).
    Clustering,
}

impl Metric {
    pub fn value(self, p: &MetricPoint) -> f64 {
        match self {
            Metric::Density => p.density,
            Metric::Clustering => p.clustering_global,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Density => "density",
            Metric::Clustering => "clustering",
        }
    }

    fn title(self) -> &'static str {
        match self {
            Metric::Density => "Network density",
            Metric::Clustering => "Clustering coefficient",
        }
    }
}

impl FromStr for Metric {
    type Err = RenderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "density" => Ok(Metric::Density),
            "clustering" => Ok(Metric::Clustering),
            other => Err(RenderError::UnknownMetric(other.to_string())),
        }
    }
}

/// Points grouped per threshold (ascending), each group sorted by date.
pub fn group_by_threshold(metrics: &[MetricPoint]) -> Vec<(f64, Vec<&MetricPoint>)> {
    let mut groups: Vec<(f64, Vec<&MetricPoint>)> = Vec::new();
    for p in metrics {
        match groups.iter_mut().find(|(t, _)| *t == p.threshold) {
            Some((_, g)) => g.push(p),
            None => groups.push((p.threshold, vec![p])),
        }
    }
    groups.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (_, g) in &mut groups {
        g.sort_by_key(|p| p.label_date);
    }
    groups
}

fn window_of(metrics: &[MetricPoint]) -> Result<usize, RenderError> {
    let first = metrics.first().ok_or(RenderError::EmptySeries)?;
    match metrics.iter().find(|p| p.window_days != first.window_days) {
        Some(other) => Err(RenderError::MixedWindows(first.window_days, other.window_days)),
        None => Ok(first.window_days),
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

struct Axes {
    first: NaiveDate,
    span_days: f64,
}

impl Axes {
    fn x(&self, date: NaiveDate) -> f64 {
        if self.span_days == 0.0 {
            return (LEFT + RIGHT) / 2.0;
        }
        LEFT + (date - self.first).num_days() as f64 / self.span_days * (RIGHT - LEFT)
    }

    fn y(value: f64) -> f64 {
        BOTTOM - value * (BOTTOM - TOP)
    }
}

fn first_of_next_month(d: NaiveDate) -> NaiveDate {
    if d.month() == 12 {
        ymd(d.year() + 1, 1, 1)
    } else {
        ymd(d.year(), d.month() + 1, 1)
    }
}

/// Renders one metric over label dates, one polyline per threshold, with a
/// dashed vertical marker for every event inside the plotted date range.
pub fn render_metric_chart(
    metrics: &[MetricPoint],
    events: &[EventRecord],
    metric: Metric,
) -> Result<String, RenderError> {
    let window = window_of(metrics)?;
    let groups = group_by_threshold(metrics);
    let first = metrics
        .iter()
        .map(|p| p.label_date)
        .min()
        .ok_or(RenderError::EmptySeries)?;
    let last = metrics
        .iter()
        .map(|p| p.label_date)
        .max()
        .ok_or(RenderError::EmptySeries)?;
    let axes = Axes {
        first,
        span_days: (last - first).num_days() as f64,
    };

    let mut svg = String::new();
    let w = &mut svg;
    let _ = writeln!(w, r##"<?xml version="1.0" encoding="UTF-8"?>"##);
    let _ = writeln!(
        w,
        r##"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12pt">"##
    );
    let _ = writeln!(
        w,
        r##"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        w,
        r##"<text class="title" x="{:.2}" y="28" text-anchor="middle">{} ({}-day window)</text>"##,
        (LEFT + RIGHT) / 2.0,
        metric.title(),
        window
    );

    // Y axis and grid.
    let _ = writeln!(w, r##"<g class="y-axis" stroke="#cccccc">"##);
    for i in 0..=5 {
        let v = i as f64 / 5.0;
        let y = Axes::y(v);
        let _ = writeln!(w, r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{RIGHT:.2}" y2="{y:.2}"/>"##);
        let _ = writeln!(
            w,
            r##"<text x="{:.2}" y="{:.2}" text-anchor="end" stroke="none" fill="#000000">{v:.1}</text>"##,
            LEFT - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(w, "</g>");

    // X axis with month ticks.
    let _ = writeln!(w, r##"<g class="x-axis" stroke="#000000">"##);
    let _ = writeln!(
        w,
        r##"<line x1="{LEFT:.2}" y1="{BOTTOM:.2}" x2="{RIGHT:.2}" y2="{BOTTOM:.2}"/>"##
    );
    let mut tick = if first.day() == 1 {
        first
    } else {
        first_of_next_month(first)
    };
    while tick <= last {
        let x = axes.x(tick);
        let _ = writeln!(
            w,
            r##"<line class="tick" x1="{x:.2}" y1="{BOTTOM:.2}" x2="{x:.2}" y2="{:.2}"/>"##,
            BOTTOM + 6.0
        );
        let _ = writeln!(
            w,
            r##"<text x="{x:.2}" y="{:.2}" text-anchor="middle" stroke="none">{}</text>"##,
            BOTTOM + 24.0,
            tick.format("%b %Y")
        );
        tick = first_of_next_month(tick);
    }
    let _ = writeln!(w, "</g>");

    // Event markers.
    let _ = writeln!(w, r##"<g class="events">"##);
    for e in events.iter().filter(|e| first <= e.date && e.date <= last) {
        let x = axes.x(e.date);
        let _ = writeln!(
            w,
            r##"<line class="event" data-category="{}" x1="{x:.2}" y1="{TOP:.2}" x2="{x:.2}" y2="{BOTTOM:.2}" stroke="{}" stroke-width="1.5" stroke-dasharray="6,4"><title>{} {}</title></line>"##,
            e.category,
            e.category.color(),
            e.date,
            escape(&e.label)
        );
    }
    let _ = writeln!(w, "</g>");

    // One line per threshold.
    let _ = writeln!(w, r##"<g class="series">"##);
    for (i, (threshold, points)) in groups.iter().enumerate() {
        let coords: Vec<String> = points
            .iter()
            .map(|p| format!("{:.2},{:.2}", axes.x(p.label_date), Axes::y(metric.value(p))))
            .collect();
        let _ = writeln!(
            w,
            r##"<polyline data-threshold="{threshold}" fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"##,
            PALETTE[i % PALETTE.len()],
            coords.join(" ")
        );
    }
    let _ = writeln!(w, "</g>");

    let _ = writeln!(w, r##"<g class="legend">"##);
    for (i, (threshold, _)) in groups.iter().enumerate() {
        let y = TOP + 10.0 + 22.0 * i as f64;
        let x = RIGHT + 20.0;
        let _ = writeln!(
            w,
            r##"<g class="legend-entry"><line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{}" stroke-width="3"/><text x="{:.2}" y="{:.2}">θ = {threshold}</text></g>"##,
            x + 24.0,
            PALETTE[i % PALETTE.len()],
            x + 32.0,
            y + 5.0
        );
    }
    let _ = writeln!(w, "</g>");
    let _ = writeln!(w, "</svg>");
    Ok(svg)
}

#[derive(Serialize)]
struct Report<'a> {
    window_days: usize,
    metric: Metric,
    points: &'a [MetricPoint],
    events: Vec<EventJoin>,
}

/// Machine-readable counterpart of a chart: the metric rows (same fields as
/// the metrics CSV) plus each event joined to its label date.
pub fn render_json_report(
    metrics: &[MetricPoint],
    events: &[EventRecord],
    metric: Metric,
) -> Result<String, RenderError> {
    let window_days = window_of(metrics)?;
    let report = Report {
        window_days,
        metric,
        points: metrics,
        events: join_events(metrics, events),
    };
    serde_json::to_string_pretty(&report)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| RenderError::Json(e.to_string()))
}
