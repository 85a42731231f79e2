//! Keyword networks from search-interest time series.
//!
//! The pipeline stitches segmented daily exports into one comparable series
//! per keyword ([`stitch`]), computes rolling distance-correlation matrices
//! ([`correlate`]), thresholds them into graphs and measures density and
//! clustering ([`netstat`]), and renders the resulting time series with
//! event annotations ([`render`], [`timeline`]).
//!
//! The numeric kernels are generic over [`Scalar`] (`f32` or `f64`). The
//! aliases below fix the scalar to `f64`, which is what the file pipeline uses.

pub mod correlate;
pub mod ingest;
pub mod netstat;
pub mod num;
pub mod pipeline;
pub mod registry;
pub mod render;
pub mod series;
pub mod stitch;
pub mod timeline;

pub use num::Scalar;
pub use registry::{Category, KeywordRegistry};
pub use series::{DateSpan, Scale};

pub type DailySeries = series::DailySeries<f64>;
pub type DailySegment = ingest::DailySegment<f64>;
pub type WeeklySeries = ingest::WeeklySeries<f64>;
pub type WeekMetrics = stitch::WeekMetrics<f64>;
pub type CorrelationFrame = correlate::CorrelationFrame<f64>;
pub type SymMatrix = correlate::SymMatrix<f64>;

pub type DailySeriesF32 = series::DailySeries<f32>;
pub type WeeklySeriesF32 = ingest::WeeklySeries<f32>;
pub type WeekMetricsF32 = stitch::WeekMetrics<f32>;
pub type CorrelationFrameF32 = correlate::CorrelationFrame<f32>;

pub use correlate::{distance_correlation, rolling_correlation};
pub use netstat::{
    clustering_avg_local, clustering_global, network_density, threshold_adjacency, GraphFrame, MetricPoint,
};
pub use stitch::{calculate_weekly_metrics, calculate_weights, rescale_values};
