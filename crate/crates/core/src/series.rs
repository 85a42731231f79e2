//! Date-indexed series and calendar spans.

use std::fmt;

use chrono::{Days, NaiveDate};

use crate::num::Scalar;

/// Inclusive range of calendar dates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DateSpan {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateSpan {
    /// Returns `None` when `end` precedes `start`.
    pub fn new(start: NaiveDate, end: NaiveDate) -> Option<Self> {
        (start <= end).then_some(Self { start, end })
    }

    /// 2020-03-16 through 2021-03-15.
    pub fn default_analysis() -> Self {
        Self {
            start: ymd(2020, 3, 16),
            end: ymd(2021, 3, 15),
        }
    }

    pub fn days(&self) -> usize {
        (self.end - self.start).num_days() as usize + 1
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }

    pub fn iter(&self) -> impl Iterator<Item = NaiveDate> {
        let end = self.end;
        self.start.iter_days().take_while(move |d| *d <= end)
    }

    pub fn intersect(&self, other: &DateSpan) -> Option<DateSpan> {
        DateSpan::new(self.start.max(other.start), self.end.min(other.end))
    }
}

impl fmt::Display for DateSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

/// Calendar date constructor for literals known to be valid.
pub fn ymd(year: i32, month: u32, day: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(year, month, day).expect("valid calendar date")
}

pub fn add_days(date: NaiveDate, n: u64) -> NaiveDate {
    date.checked_add_days(Days::new(n)).expect("date in range")
}

pub fn parse_iso_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").ok()
}

/// Whether daily values are segment-local export values or stitched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scale {
    Raw,
    Rescaled,
}

/// Consecutive daily values for one keyword.
///
/// Dates are implicit: point `i` sits at `start + i` days, which makes
/// consecutiveness and uniqueness hold by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DailySeries<T> {
    keyword: String,
    start: NaiveDate,
    values: Vec<T>,
    scale: Scale,
}

impl<T: Scalar> DailySeries<T> {
    /// Panics if `values` is empty.
    pub fn new(keyword: impl Into<String>, start: NaiveDate, values: Vec<T>, scale: Scale) -> Self {
        assert!(!values.is_empty(), "daily series needs at least one value");
        Self {
            keyword: keyword.into(),
            start,
            values,
            scale,
        }
    }

    pub fn keyword(&self) -> &str {
        &self.keyword
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn start(&self) -> NaiveDate {
        self.start
    }

    pub fn end(&self) -> NaiveDate {
        add_days(self.start, self.values.len() as u64 - 1)
    }

    pub fn span(&self) -> DateSpan {
        DateSpan {
            start: self.start(),
            end: self.end(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn date_at(&self, index: usize) -> NaiveDate {
        add_days(self.start, index as u64)
    }

    pub fn get(&self, date: NaiveDate) -> Option<T> {
        let offset = (date - self.start).num_days();
        usize::try_from(offset).ok().and_then(|i| self.values.get(i).copied())
    }

    pub fn points(&self) -> impl Iterator<Item = (NaiveDate, T)> + '_ {
        self.start.iter_days().zip(self.values.iter().copied())
    }

    /// Canonical `date,value` CSV with shortest round-trip float formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("date,value\n");
        for (date, value) in self.points() {
            out.push_str(&format!("{date},{value}\n"));
        }
        out
    }
}
