//! Parsing and validation of search-interest CSV exports.
//!
//! Exports look like
//!
//! ```text
//! Category: All categories
//!
//! Day,cough: (Metro Manila)
//! 2020-03-16,42
//! 2020-03-17,<1
//! ```
//!
//! Any row whose first field is not an ISO date is treated as preamble.
//! The censored export value `<1` is read as 0.5.

use chrono::NaiveDate;
use thiserror::Error;

use crate::num::Scalar;
use crate::registry::normalize_keyword;
use crate::series::{add_days, parse_iso_date, DailySeries, DateSpan, Scale};

/// Value substituted for the `<1` export token.
pub const BELOW_ONE: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngestError {
    #[error("{keyword}: no data rows")]
    EmptySegment { keyword: String },
    #[error("{keyword}: no data rows")]
    EmptySeries { keyword: String },
    #[error("{keyword}: line {line}: dates not consecutive ({previous} followed by {found}, expected {expected})")]
    NonConsecutiveDates {
        keyword: String,
        line: usize,
        previous: NaiveDate,
        found: NaiveDate,
        expected: NaiveDate,
    },
    #[error("{keyword}: line {line}: week starting {found} is {days} days after {previous}, expected 7")]
    IrregularWeekSpacing {
        keyword: String,
        line: usize,
        previous: NaiveDate,
        found: NaiveDate,
        days: i64,
    },
    #[error("{keyword}: line {line} ({date}): value {value} outside [0, 100]")]
    ValueOutOfRange {
        keyword: String,
        line: usize,
        date: NaiveDate,
        value: f64,
    },
    #[error("{keyword}: line {line} ({date}): unreadable value `{raw}`")]
    InvalidValue {
        keyword: String,
        line: usize,
        date: NaiveDate,
        raw: String,
    },
    #[error("{keyword}: line {line}: malformed CSV row")]
    MalformedRow { keyword: String, line: usize },
    #[error("{keyword}: segments overlap on {date}")]
    Overlap { keyword: String, date: NaiveDate },
    #[error("{keyword}: missing days {missing_from}..{missing_to} between segments")]
    Gap {
        keyword: String,
        missing_from: NaiveDate,
        missing_to: NaiveDate,
    },
    #[error("{keyword}: assembled span {found} does not cover {required}")]
    Span {
        keyword: String,
        found: DateSpan,
        required: DateSpan,
    },
    #[error("segment for `{found}` mixed into series for `{expected}`")]
    KeywordMismatch { expected: String, found: String },
}

/// One standalone daily export covering a contiguous run of dates.
#[derive(Debug, Clone, PartialEq)]
pub struct DailySegment<T> {
    keyword: String,
    points: Vec<(NaiveDate, T)>,
}

impl<T: Scalar> DailySegment<T> {
    pub fn keyword(&self) -> &str {
        &self.keyword
    }

    pub fn start_date(&self) -> NaiveDate {
        self.points[0].0
    }

    pub fn end_date(&self) -> NaiveDate {
        self.points[self.points.len() - 1].0
    }

    pub fn points(&self) -> &[(NaiveDate, T)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max(&self) -> T {
        self.points.iter().map(|p| p.1).fold(T::zero(), |a, b| a.max(b))
    }

    /// Exports are normalized so the peak reads 100 unless the whole period
    /// is zero. Anything else is suspicious but not fatal.
    pub fn normalization_warning(&self) -> Option<String> {
        let max = self.max();
        let hundred = T::from_f64_lossy(100.0);
        if max == hundred || max == T::zero() {
            None
        } else {
            Some(format!(
                "{}: segment {}..{} peaks at {} rather than 100",
                self.keyword,
                self.start_date(),
                self.end_date(),
                max
            ))
        }
    }

    pub fn to_csv(&self) -> String {
        emit_rows("date", &self.points)
    }
}

/// Year-long weekly export: one value per week start, 7 days apart.
#[derive(Debug, Clone, PartialEq)]
pub struct WeeklySeries<T> {
    keyword: String,
    points: Vec<(NaiveDate, T)>,
}

impl<T: Scalar> WeeklySeries<T> {
    pub fn keyword(&self) -> &str {
        &self.keyword
    }

    pub fn points(&self) -> &[(NaiveDate, T)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first_week_start(&self) -> NaiveDate {
        self.points[0].0
    }

    /// Last day covered by the final week.
    pub fn last_covered_day(&self) -> NaiveDate {
        add_days(self.points[self.points.len() - 1].0, 6)
    }

    pub fn to_csv(&self) -> String {
        emit_rows("week", &self.points)
    }
}

fn emit_rows<T: Scalar>(header: &str, points: &[(NaiveDate, T)]) -> String {
    let mut out = format!("{header},value\n");
    for (date, value) in points {
        out.push_str(&format!("{date},{value}\n"));
    }
    out
}

/// `(line, date, value)` rows with preamble dropped and values range-checked.
fn data_rows<T: Scalar>(raw_csv: &str, keyword: &str) -> Result<Vec<(usize, NaiveDate, T)>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(raw_csv.as_bytes());
    let mut rows = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        let more = reader.read_record(&mut record).map_err(|e| IngestError::MalformedRow {
            keyword: keyword.to_string(),
            line: e.position().map_or(0, |p| p.line() as usize),
        })?;
        if !more {
            break;
        }
        let line = record.position().map_or(0, |p| p.line() as usize);
        let Some(date) = record.get(0).and_then(parse_iso_date) else {
            continue;
        };
        let raw = record.get(1).unwrap_or("").to_string();
        let value = parse_value(&raw).ok_or_else(|| IngestError::InvalidValue {
            keyword: keyword.to_string(),
            line,
            date,
            raw: raw.clone(),
        })?;
        if !(0.0..=100.0).contains(&value) {
            return Err(IngestError::ValueOutOfRange {
                keyword: keyword.to_string(),
                line,
                date,
                value,
            });
        }
        rows.push((line, date, T::from_f64_lossy(value)));
    }
    Ok(rows)
}

fn parse_value(raw: &str) -> Option<f64> {
    let raw = raw.trim();
    if raw == "<1" {
        return Some(BELOW_ONE);
    }
    raw.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parses one daily export into a validated segment.
pub fn parse_daily_segment<T: Scalar>(raw_csv: &str, keyword: &str) -> Result<DailySegment<T>, IngestError> {
    let keyword = normalize_keyword(keyword);
    let rows = data_rows::<T>(raw_csv, &keyword)?;
    if rows.is_empty() {
        return Err(IngestError::EmptySegment { keyword });
    }
    for pair in rows.windows(2) {
        let (_, previous, _) = pair[0];
        let (line, found, _) = pair[1];
        let expected = add_days(previous, 1);
        if found != expected {
            return Err(IngestError::NonConsecutiveDates {
                keyword,
                line,
                previous,
                found,
                expected,
            });
        }
    }
    let points = rows.into_iter().map(|(_, d, v)| (d, v)).collect();
    Ok(DailySegment { keyword, points })
}

/// Parses a weekly export; week starts must be exactly 7 days apart.
pub fn parse_weekly<T: Scalar>(raw_csv: &str, keyword: &str) -> Result<WeeklySeries<T>, IngestError> {
    let keyword = normalize_keyword(keyword);
    let rows = data_rows::<T>(raw_csv, &keyword)?;
    if rows.is_empty() {
        return Err(IngestError::EmptySeries { keyword });
    }
    for pair in rows.windows(2) {
        let (_, previous, _) = pair[0];
        let (line, found, _) = pair[1];
        let days = (found - previous).num_days();
        if days != 7 {
            return Err(IngestError::IrregularWeekSpacing {
                keyword,
                line,
                previous,
                found,
                days,
            });
        }
    }
    let points = rows.into_iter().map(|(_, d, v)| (d, v)).collect();
    Ok(WeeklySeries { keyword, points })
}

/// Merges one keyword's segments into a single raw series trimmed to `span`.
///
/// Each segment must begin the day after its predecessor ends.
pub fn assemble_daily<T: Scalar>(
    mut segments: Vec<DailySegment<T>>,
    span: DateSpan,
) -> Result<DailySeries<T>, IngestError> {
    let Some(first) = segments.first() else {
        return Err(IngestError::EmptySeries { keyword: String::new() });
    };
    let keyword = first.keyword.clone();
    if let Some(other) = segments.iter().find(|s| s.keyword != keyword) {
        return Err(IngestError::KeywordMismatch {
            expected: keyword,
            found: other.keyword.clone(),
        });
    }
    segments.sort_by_key(DailySegment::start_date);

    for pair in segments.windows(2) {
        let prev_end = pair[0].end_date();
        let next_start = pair[1].start_date();
        let expected = add_days(prev_end, 1);
        if next_start < expected {
            return Err(IngestError::Overlap {
                keyword,
                date: next_start,
            });
        }
        if next_start > expected {
            return Err(IngestError::Gap {
                keyword,
                missing_from: expected,
                missing_to: next_start.pred_opt().expect("date in range"),
            });
        }
    }

    let found = DateSpan {
        start: segments[0].start_date(),
        end: segments[segments.len() - 1].end_date(),
    };
    if found.start > span.start || found.end < span.end {
        return Err(IngestError::Span {
            keyword,
            found,
            required: span,
        });
    }

    let values = segments
        .iter()
        .flat_map(|s| s.points.iter())
        .filter(|(d, _)| span.contains(*d))
        .map(|&(_, v)| v)
        .collect();
    Ok(DailySeries::new(keyword, span.start, values, Scale::Raw))
}
