//! Dated pandemic events used to annotate metric charts.

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::Serialize;
use thiserror::Error;

use crate::netstat::MetricPoint;
use crate::series::{parse_iso_date, DateSpan};

/// Metro Manila COVID-19 events, March 2020 to March 2021.
pub const DEFAULT_EVENTS_CSV: &str = include_str!("../events/ph_covid_2020_2021.csv");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TimelineError {
    #[error("line {line}: unknown event category `{category}`")]
    UnknownCategory { line: usize, category: String },
    #[error("line {line}: unreadable date `{raw}`")]
    InvalidDate { line: usize, raw: String },
    #[error("line {line}: expected `date,label,category`")]
    Malformed { line: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EventCategory {
    Quarantine,
    Milestone,
    Variant,
    Policy,
    Vaccine,
}

impl EventCategory {
    pub const ALL: [EventCategory; 5] = [
        EventCategory::Quarantine,
        EventCategory::Milestone,
        EventCategory::Variant,
        EventCategory::Policy,
        EventCategory::Vaccine,
    ];

    pub fn token(self) -> &'static str {
        match self {
            EventCategory::Quarantine => "Quarantine",
            EventCategory::Milestone => "Milestone",
            EventCategory::Variant => "Variant",
            EventCategory::Policy => "Policy",
            EventCategory::Vaccine => "Vaccine",
        }
    }

    /// Marker colour: lockdowns magenta, milestones and variants black,
    /// policy orange, vaccines yellow.
    pub fn color(self) -> &'static str {
        match self {
            EventCategory::Quarantine => "#ff00ff",
            EventCategory::Milestone | EventCategory::Variant => "#000000",
            EventCategory::Policy => "#ffa500",
            EventCategory::Vaccine => "#ffd700",
        }
    }
}

impl fmt::Display for EventCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for EventCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        EventCategory::ALL
            .into_iter()
            .find(|c| c.token().eq_ignore_ascii_case(s))
            .ok_or_else(|| s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EventRecord {
    pub date: NaiveDate,
    pub label: String,
    pub category: EventCategory,
}

/// Reads `date,label,category` rows (header optional), sorted by date.
/// Labels may be quoted to carry commas.
pub fn load_events(raw_csv: &str) -> Result<Vec<EventRecord>, TimelineError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(raw_csv.as_bytes());
    let mut events = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(|_| TimelineError::Malformed { line })?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if line == 1 && record[0].eq_ignore_ascii_case("date") {
            continue;
        }
        if record.len() != 3 {
            return Err(TimelineError::Malformed { line });
        }
        let date = parse_iso_date(&record[0]).ok_or_else(|| TimelineError::InvalidDate {
            line,
            raw: record[0].to_string(),
        })?;
        let category = record[2]
            .parse()
            .map_err(|category| TimelineError::UnknownCategory { line, category })?;
        events.push(EventRecord {
            date,
            label: record[1].to_string(),
            category,
        });
    }
    events.sort_by_key(|e| e.date);
    Ok(events)
}

pub fn default_events() -> Vec<EventRecord> {
    load_events(DEFAULT_EVENTS_CSV).expect("bundled events parse")
}

/// Events dated outside `span`; worth a warning, not an error.
pub fn events_outside(events: &[EventRecord], span: DateSpan) -> Vec<&EventRecord> {
    events.iter().filter(|e| !span.contains(e.date)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JoinKind {
    Exact,
    NearestFollowing,
    Unmatched,
}

/// An event paired with the metric points of the label date it maps to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventJoin {
    pub event: EventRecord,
    pub kind: JoinKind,
    pub label_date: Option<NaiveDate>,
    pub points: Vec<MetricPoint>,
}

/// Pairs each event with the points at its date, or at the first label date
/// after it. Events after the last label date stay unmatched. Output follows
/// the order of `events`.
pub fn join_events(metrics: &[MetricPoint], events: &[EventRecord]) -> Vec<EventJoin> {
    let mut dates: Vec<NaiveDate> = metrics.iter().map(|p| p.label_date).collect();
    dates.sort();
    dates.dedup();
    events
        .iter()
        .map(|event| {
            let idx = dates.partition_point(|d| *d < event.date);
            let (kind, label_date) = match dates.get(idx) {
                Some(&d) if d == event.date => (JoinKind::Exact, Some(d)),
                Some(&d) => (JoinKind::NearestFollowing, Some(d)),
                None => (JoinKind::Unmatched, None),
            };
            let points = label_date
                .map(|d| metrics.iter().filter(|p| p.label_date == d).cloned().collect())
                .unwrap_or_default();
            EventJoin {
                event: event.clone(),
                kind,
                label_date,
                points,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{add_days, ymd};

    #[test]
    fn bundled_timeline() {
        let events = default_events();
        assert_eq!(events.len(), 16);
        assert!(events.windows(2).all(|w| w[0].date <= w[1].date));
        assert!(events_outside(&events, DateSpan::default_analysis()).is_empty());
        let milestone = events.iter().find(|e| e.date == ymd(2020, 8, 2)).unwrap();
        assert_eq!(milestone.label, "100,000 COVID-19 recorded cases surpassed nationwide");
        let count = |c| events.iter().filter(|e| e.category == c).count();
        assert_eq!(count(EventCategory::Quarantine), 6);
        assert_eq!(count(EventCategory::Milestone), 2);
        assert_eq!(count(EventCategory::Variant), 4);
        assert_eq!(count(EventCategory::Policy), 2);
        assert_eq!(count(EventCategory::Vaccine), 2);
    }

    #[test]
    fn single_rows() {
        let e = load_events("2020-04-07,ECQ in Metro Manila extended to Apr 30,Quarantine\n").unwrap();
        assert_eq!(e[0].category.color(), "#ff00ff");
        let e = load_events("2021-01-14,Pfizer COVID-19 vaccine approved for emergency use,Vaccine").unwrap();
        assert_eq!(e[0].category, EventCategory::Vaccine);
        assert_eq!(e[0].category.color(), "#ffd700");
        assert!(load_events("").unwrap().is_empty());
    }

    #[test]
    fn load_errors() {
        assert_eq!(
            load_events("2020-04-07,x,Weather\n"),
            Err(TimelineError::UnknownCategory {
                line: 1,
                category: "Weather".into()
            })
        );
        assert!(matches!(
            load_events("April 7,x,Quarantine\n"),
            Err(TimelineError::InvalidDate { .. })
        ));
        assert!(matches!(
            load_events("2020-04-07,x\n"),
            Err(TimelineError::Malformed { line: 1 })
        ));
    }

    fn point(date: NaiveDate, threshold: f64) -> MetricPoint {
        MetricPoint {
            label_date: date,
            window_days: 15,
            threshold,
            edge_count: 0,
            density: 0.0,
            clustering_global: 0.0,
            clustering_avg_local: 0.0,
        }
    }

    #[test]
    fn joins() {
        let metrics: Vec<MetricPoint> = (0..351u64)
            .flat_map(|i| {
                let d = add_days(ymd(2020, 3, 31), i);
                [point(d, 0.4), point(d, 0.8)]
            })
            .collect();
        let events =
            load_events("2020-03-20,early,Policy\n2020-04-07,on a label date,Quarantine\n2021-03-20,late,Variant\n")
                .unwrap();
        let joined = join_events(&metrics, &events);
        assert_eq!(joined.len(), 3);
        assert_eq!(joined[0].kind, JoinKind::NearestFollowing);
        assert_eq!(joined[0].label_date, Some(ymd(2020, 3, 31)));
        assert_eq!(joined[1].kind, JoinKind::Exact);
        assert_eq!(joined[1].points.len(), 2);
        assert_eq!(joined[2].kind, JoinKind::Unmatched);
        assert!(joined[2].points.is_empty());
    }
}
