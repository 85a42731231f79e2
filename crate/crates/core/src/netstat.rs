//! Thresholded keyword graphs and their network statistics.

use chrono::NaiveDate;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::correlate::CorrelationFrame;
use crate::num::{format_significant, Scalar};
use crate::series::{parse_iso_date, DateSpan};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetstatError {
    #[error("threshold {0} outside (0, 1)")]
    ThetaOutOfRange(f64),
    #[error("no frames fall within {0}")]
    EmptyPeriod(DateSpan),
    #[error("frames mix thresholds {0} and {1}")]
    MixedThresholds(f64, f64),
    #[error("{keywords} keywords for graphs of {vertices} vertices")]
    KeywordCount { keywords: usize, vertices: usize },
    #[error("metrics CSV line {line}: {reason}")]
    MalformedMetrics { line: usize, reason: String },
}

/// Undirected simple graph over keyword indices for one label date.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFrame {
    pub label_date: NaiveDate,
    pub threshold: f64,
    size: usize,
    adjacency: Vec<bool>,
}

impl GraphFrame {
    pub fn empty(label_date: NaiveDate, threshold: f64, size: usize) -> Self {
        Self {
            label_date,
            threshold,
            size,
            adjacency: vec![false; size * size],
        }
    }

    /// Self-loops in `edges` are ignored.
    pub fn from_edges(
        label_date: NaiveDate,
        threshold: f64,
        size: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let mut g = Self::empty(label_date, threshold, size);
        for (i, j) in edges {
            g.set_edge(i, j, true);
        }
        g
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i * self.size + j]
    }

    pub fn set_edge(&mut self, i: usize, j: usize, present: bool) {
        if i == j {
            return;
        }
        self.adjacency[i * self.size + j] = present;
        self.adjacency[j * self.size + i] = present;
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v * self.size..(v + 1) * self.size]
            .iter()
            .filter(|&&e| e)
            .count()
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Edges as `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.size).flat_map(move |i| {
            (i + 1..self.size)
                .filter(move |&j| self.has_edge(i, j))
                .map(move |j| (i, j))
        })
    }

    pub fn has_triangle(&self, a: usize, b: usize, c: usize) -> bool {
        self.has_edge(a, b) && self.has_edge(b, c) && self.has_edge(a, c)
    }
}

/// Keeps an edge wherever the correlation is at least `theta`.
pub fn threshold_adjacency<T: Scalar>(frame: &CorrelationFrame<T>, theta: T) -> Result<GraphFrame, NetstatError> {
    let theta_f = theta.as_f64();
    if !(theta > T::zero() && theta < T::one()) {
        return Err(NetstatError::ThetaOutOfRange(theta_f));
    }
    let k = frame.matrix.size();
    let mut g = GraphFrame::empty(frame.label_date, theta_f, k);
    for i in 0..k {
        for j in i + 1..k {
            if frame.matrix.get(i, j) >= theta {
                g.set_edge(i, j, true);
            }
        }
    }
    Ok(g)
}

/// `2E / (V (V - 1))`; 0 for graphs with fewer than two vertices.
pub fn network_density(g: &GraphFrame) -> f64 {
    let v = g.size();
    if v < 2 {
        return 0.0;
    }
    2.0 * g.edge_count() as f64 / (v * (v - 1)) as f64
}

/// Number of triangles through each vertex.
pub fn triangles_per_vertex(g: &GraphFrame) -> Vec<u64> {
    let k = g.size();
    let mut counts = vec![0u64; k];
    for a in 0..k {
        for b in a + 1..k {
            if !g.has_edge(a, b) {
                continue;
            }
            for c in b + 1..k {
                if g.has_edge(b, c) && g.has_edge(a, c) {
                    counts[a] += 1;
                    counts[b] += 1;
                    counts[c] += 1;
                }
            }
        }
    }
    counts
}

/// Connected triples centred on each vertex, `deg (deg - 1) / 2`.
pub fn triples_per_vertex(g: &GraphFrame) -> Vec<u64> {
    (0..g.size())
        .map(|v| {
            let d = g.degree(v) as u64;
            d * d.saturating_sub(1) / 2
        })
        .collect()
}

/// Transitivity as an exact ratio `Σ λ(v) / Σ τ(v)`; 0 without any triple.
pub fn clustering_global_exact(g: &GraphFrame) -> Ratio<u64> {
    let closed: u64 = triangles_per_vertex(g).iter().sum();
    let triples: u64 = triples_per_vertex(g).iter().sum();
    if triples == 0 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(closed, triples)
    }
}

pub fn clustering_global(g: &GraphFrame) -> f64 {
    ratio_to_f64(clustering_global_exact(g))
}

/// Mean of local coefficients `λ(v) / τ(v)`, with vertices of degree < 2
/// contributing 0.
pub fn clustering_avg_local_exact(g: &GraphFrame) -> Ratio<u128> {
    let v = g.size();
    if v == 0 {
        return Ratio::from_integer(0);
    }
    let total = triangles_per_vertex(g)
        .into_iter()
        .zip(triples_per_vertex(g))
        .filter(|&(_, t)| t > 0)
        .fold(Ratio::from_integer(0u128), |acc, (l, t)| {
            acc + Ratio::new(u128::from(l), u128::from(t))
        });
    total / Ratio::from_integer(v as u128)
}

pub fn clustering_avg_local(g: &GraphFrame) -> f64 {
    let v = g.size();
    if v == 0 {
        return 0.0;
    }
    let sum: f64 = triangles_per_vertex(g)
        .into_iter()
        .zip(triples_per_vertex(g))
        .filter(|&(_, t)| t > 0)
        .map(|(l, t)| l as f64 / t as f64)
        .sum();
    sum / v as f64
}

pub fn ratio_to_f64<I: Clone + num_traits::ToPrimitive>(r: Ratio<I>) -> f64 {
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

/// One row of the metrics report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricPoint {
    pub label_date: NaiveDate,
    pub window_days: usize,
    pub threshold: f64,
    pub edge_count: usize,
    pub density: f64,
    pub clustering_global: f64,
    pub clustering_avg_local: f64,
}

impl MetricPoint {
    pub fn from_graph(g: &GraphFrame, window_days: usize) -> Self {
        Self {
            label_date: g.label_date,
            window_days,
            threshold: g.threshold,
            edge_count: g.edge_count(),
            density: network_density(g),
            clustering_global: clustering_global(g),
            clustering_avg_local: clustering_avg_local(g),
        }
    }
}

pub const METRICS_HEADER: &str =
    "label_date,window_days,threshold,edge_count,density,clustering_global,clustering_avg_local";

pub fn metrics_to_csv(points: &[MetricPoint]) -> String {
    let mut out = format!("{METRICS_HEADER}\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            p.label_date,
            p.window_days,
            p.threshold,
            p.edge_count,
            format_significant(p.density, 12),
            format_significant(p.clustering_global, 12),
            format_significant(p.clustering_avg_local, 12),
        ));
    }
    out
}

pub fn metrics_from_csv(raw: &str) -> Result<Vec<MetricPoint>, NetstatError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(raw.as_bytes());
    let header_ok = reader
        .headers()
        .map(|h| h.iter().collect::<Vec<_>>().join(",") == METRICS_HEADER)
        .unwrap_or(false);
    if !header_ok {
        return Err(NetstatError::MalformedMetrics {
            line: 1,
            reason: format!("expected header `{METRICS_HEADER}`"),
        });
    }
    let mut points = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let bad = |reason: String| NetstatError::MalformedMetrics { line, reason };
        let record = record.map_err(|e| bad(e.to_string()))?;
        if record.len() != 7 {
            return Err(bad(format!("expected 7 fields, found {}", record.len())));
        }
        let num = |idx: usize| -> Result<f64, NetstatError> {
            record[idx]
                .parse::<f64>()
                .map_err(|_| bad(format!("unreadable number `{}`", &record[idx])))
        };
        let int = |idx: usize| -> Result<usize, NetstatError> {
            record[idx]
                .parse::<usize>()
                .map_err(|_| bad(format!("unreadable integer `{}`", &record[idx])))
        };
        points.push(MetricPoint {
            label_date: parse_iso_date(&record[0]).ok_or_else(|| bad(format!("unreadable date `{}`", &record[0])))?,
            window_days: int(1)?,
            threshold: num(2)?,
            edge_count: int(3)?,
            density: num(4)?,
            clustering_global: num(5)?,
            clustering_avg_local: num(6)?,
        });
    }
    Ok(points)
}

/// How many frames within a period contain a given edge or triangle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Persistence {
    pub members: Vec<String>,
    pub count: usize,
}

fn frames_in_period<'a>(
    frames: &'a [GraphFrame],
    keywords: &[String],
    period: DateSpan,
) -> Result<Vec<&'a GraphFrame>, NetstatError> {
    if let Some(first) = frames.first() {
        if let Some(other) = frames.iter().find(|f| f.threshold != first.threshold) {
            return Err(NetstatError::MixedThresholds(first.threshold, other.threshold));
        }
        if let Some(f) = frames.iter().find(|f| f.size() != keywords.len()) {
            return Err(NetstatError::KeywordCount {
                keywords: keywords.len(),
                vertices: f.size(),
            });
        }
    }
    let selected: Vec<&GraphFrame> = frames.iter().filter(|f| period.contains(f.label_date)).collect();
    if selected.is_empty() {
        return Err(NetstatError::EmptyPeriod(period));
    }
    Ok(selected)
}

fn rank(mut rows: Vec<Persistence>, include_zero: bool) -> Vec<Persistence> {
    if !include_zero {
        rows.retain(|r| r.count > 0);
    }
    rows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.members.cmp(&b.members)));
    rows
}

/// Edge counts over the frames labelled within `period`, most persistent
/// first, ties ordered by member names. Zero-count pairs are kept only when
/// `include_zero` is set.
pub fn pair_persistence(
    frames: &[GraphFrame],
    keywords: &[String],
    period: DateSpan,
    include_zero: bool,
) -> Result<Vec<Persistence>, NetstatError> {
    let selected = frames_in_period(frames, keywords, period)?;
    let k = keywords.len();
    let mut rows = Vec::with_capacity(k * k.saturating_sub(1) / 2);
    for a in 0..k {
        for b in a + 1..k {
            rows.push(Persistence {
                members: vec![keywords[a].clone(), keywords[b].clone()],
                count: selected.iter().filter(|g| g.has_edge(a, b)).count(),
            });
        }
    }
    Ok(rank(rows, include_zero))
}

/// Closed-triangle counts over the frames labelled within `period`.
pub fn triad_persistence(
    frames: &[GraphFrame],
    keywords: &[String],
    period: DateSpan,
    include_zero: bool,
) -> Result<Vec<Persistence>, NetstatError> {
    let selected = frames_in_period(frames, keywords, period)?;
    let k = keywords.len();
    let mut rows = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                rows.push(Persistence {
                    members: vec![keywords[a].clone(), keywords[b].clone(), keywords[c].clone()],
                    count: selected.iter().filter(|g| g.has_triangle(a, b, c)).count(),
                });
            }
        }
    }
    Ok(rank(rows, include_zero))
}

pub const PERSISTENCE_HEADER: &str = "period_start,period_end,threshold,members,count";

/// Appends rows to a persistence report; callers write the header once.
pub fn persistence_rows(period: DateSpan, threshold: f64, rows: &[Persistence]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            period.start,
            period.end,
            threshold,
            r.members.join("|"),
            r.count
        ));
    }
    out
}
