//! Weekly-weight rescaling of stitched daily exports.
//!
//! Each daily export is normalized to its own window, so values from two
//! segments are not comparable. A year-long weekly export shares one scale;
//! rescaling every day by `weekly value / mean daily value of that week`
//! restores that common scale. Three passes:
//!
//! 1. [`calculate_weekly_metrics`] bins daily values into half-open weeks
//!    `[week_start, week_start + 7)` and records sum, count and mean.
//! 2. [`calculate_weights`] sets `weight = weekly / avg`, or 1 when `avg == 0`.
//! 3. [`rescale_values`] multiplies each day by its week's weight, leaving
//!    days in zero-mean weeks untouched.

use chrono::NaiveDate;
use thiserror::Error;

use crate::ingest::WeeklySeries;
use crate::num::Scalar;
use crate::series::{add_days, DailySeries, Scale};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StitchError {
    #[error("{keyword}: {date} is not covered by any week of the weekly series")]
    UncoveredDate { keyword: String, date: NaiveDate },
    #[error("{keyword}: daily series is already rescaled")]
    NotRaw { keyword: String },
    #[error("daily series `{daily}` paired with weekly series `{weekly}`")]
    KeywordMismatch { daily: String, weekly: String },
}

/// Per-week aggregates of the daily series plus the derived weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeekMetrics<T> {
    pub week_start: NaiveDate,
    /// Value of this week in the weekly export.
    pub weekly_rsv: T,
    pub sum: T,
    pub count: usize,
    pub avg: T,
    pub weight: T,
}

impl<T: Scalar> WeekMetrics<T> {
    pub fn week_end(&self) -> NaiveDate {
        add_days(self.week_start, 7)
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.week_start <= date && date < self.week_end()
    }
}

fn week_index<T: Scalar>(metrics: &[WeekMetrics<T>], date: NaiveDate) -> Option<usize> {
    let first = metrics.first()?.week_start;
    let offset = (date - first).num_days();
    if offset < 0 {
        return None;
    }
    let idx = (offset / 7) as usize;
    metrics.get(idx).filter(|w| w.contains(date)).map(|_| idx)
}

/// Bins every daily value into the week containing it.
///
/// Weeks without daily values keep `sum = count = avg = 0`. The weight is
/// left at 1 until [`calculate_weights`] runs.
pub fn calculate_weekly_metrics<T: Scalar>(
    weekly: &WeeklySeries<T>,
    daily: &DailySeries<T>,
) -> Result<Vec<WeekMetrics<T>>, StitchError> {
    if daily.scale() != Scale::Raw {
        return Err(StitchError::NotRaw {
            keyword: daily.keyword().to_string(),
        });
    }
    let mut metrics: Vec<WeekMetrics<T>> = weekly
        .points()
        .iter()
        .map(|&(week_start, weekly_rsv)| WeekMetrics {
            week_start,
            weekly_rsv,
            sum: T::zero(),
            count: 0,
            avg: T::zero(),
            weight: T::one(),
        })
        .collect();

    for (date, value) in daily.points() {
        let idx = week_index(&metrics, date).ok_or_else(|| StitchError::UncoveredDate {
            keyword: daily.keyword().to_string(),
            date,
        })?;
        let week = &mut metrics[idx];
        week.sum = week.sum + value;
        week.count += 1;
    }
    for week in &mut metrics {
        if week.count > 0 {
            week.avg = week.sum / T::from_usize_lossy(week.count);
        }
    }
    Ok(metrics)
}

/// Sets each week's weight to `weekly_rsv / avg`, defaulting to 1 for `avg == 0`.
pub fn calculate_weights<T: Scalar>(mut metrics: Vec<WeekMetrics<T>>) -> Vec<WeekMetrics<T>> {
    for week in &mut metrics {
        week.weight = if week.avg == T::zero() {
            T::one()
        } else {
            week.weekly_rsv / week.avg
        };
    }
    metrics
}

/// Multiplies each daily value by its week's weight.
pub fn rescale_values<T: Scalar>(
    daily: &DailySeries<T>,
    metrics: &[WeekMetrics<T>],
) -> Result<DailySeries<T>, StitchError> {
    if daily.scale() != Scale::Raw {
        return Err(StitchError::NotRaw {
            keyword: daily.keyword().to_string(),
        });
    }
    let values = daily
        .points()
        .map(|(date, value)| {
            let week = week_index(metrics, date)
                .map(|i| &metrics[i])
                .ok_or_else(|| StitchError::UncoveredDate {
                    keyword: daily.keyword().to_string(),
                    date,
                })?;
            Ok(if week.avg == T::zero() {
                value
            } else {
                value * week.weight
            })
        })
        .collect::<Result<Vec<_>, StitchError>>()?;
    Ok(DailySeries::new(
        daily.keyword(),
        daily.start(),
        values,
        Scale::Rescaled,
    ))
}

/// Runs all three passes for one keyword.
pub fn stitch<T: Scalar>(
    daily: &DailySeries<T>,
    weekly: &WeeklySeries<T>,
) -> Result<(DailySeries<T>, Vec<WeekMetrics<T>>), StitchError> {
    if daily.keyword() != weekly.keyword() {
        return Err(StitchError::KeywordMismatch {
            daily: daily.keyword().to_string(),
            weekly: weekly.keyword().to_string(),
        });
    }
    let metrics = calculate_weights(calculate_weekly_metrics(weekly, daily)?);
    let rescaled = rescale_values(daily, &metrics)?;
    Ok((rescaled, metrics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_weekly;
    use crate::series::ymd;

    fn weekly(start: NaiveDate, values: &[f64]) -> WeeklySeries<f64> {
        let csv: String = values
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{},{}\n", add_days(start, 7 * i as u64), v))
            .collect();
        parse_weekly(&csv, "cough").unwrap()
    }

    fn daily(start: NaiveDate, values: &[f64]) -> DailySeries<f64> {
        DailySeries::new("cough", start, values.to_vec(), Scale::Raw)
    }

    #[test]
    fn full_week_metrics() {
        let w = weekly(ymd(2020, 3, 15), &[50.0]);
        let d = daily(ymd(2020, 3, 15), &[10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0]);
        let m = calculate_weekly_metrics(&w, &d).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!((m[0].sum, m[0].count, m[0].avg), (280.0, 7, 40.0));
    }

    #[test]
    fn empty_and_partial_weeks() {
        // Daily data starts mid-way through the second week and ends after three days.
        let w = weekly(ymd(2020, 3, 1), &[80.0, 60.0]);
        let d = daily(ymd(2020, 3, 8), &[10.0, 20.0, 30.0]);
        let m = calculate_weights(calculate_weekly_metrics(&w, &d).unwrap());
        assert_eq!((m[0].sum, m[0].count, m[0].avg, m[0].weight), (0.0, 0, 0.0, 1.0));
        assert_eq!((m[1].count, m[1].avg), (3, 20.0));
        assert_eq!(m[1].weight, 3.0);
    }

    #[test]
    fn weights() {
        let base = WeekMetrics {
            week_start: ymd(2020, 3, 15),
            weekly_rsv: 50.0,
            sum: 280.0,
            count: 7,
            avg: 40.0,
            weight: 1.0,
        };
        let identity = WeekMetrics {
            weekly_rsv: 37.0,
            avg: 37.0,
            ..base
        };
        let zero = WeekMetrics {
            weekly_rsv: 80.0,
            avg: 0.0,
            sum: 0.0,
            count: 0,
            ..base
        };
        let out = calculate_weights(vec![base, identity, zero]);
        assert_eq!(out[0].weight, 1.25);
        assert_eq!(out[1].weight, 1.0);
        assert_eq!(out[2].weight, 1.0);
        assert_eq!(out[0].sum, 280.0);
        assert_eq!(out[0].count, 7);
    }

    #[test]
    fn rescale() {
        let w = weekly(ymd(2020, 3, 15), &[50.0, 80.0]);
        let d = daily(
            ymd(2020, 3, 15),
            &[
                10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
            ],
        );
        let (out, metrics) = stitch(&d, &w).unwrap();
        assert_eq!(metrics[0].weight, 1.25);
        assert_eq!(out.scale(), Scale::Rescaled);
        assert_eq!(out.values()[0], 12.5);
        assert_eq!(out.values()[6], 87.5);
        // Zero-mean week is passed through.
        assert!(out.values()[7..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn uncovered_dates() {
        let w = weekly(ymd(2020, 3, 15), &[50.0]);
        let before = daily(ymd(2020, 3, 14), &[1.0, 2.0]);
        assert_eq!(
            calculate_weekly_metrics(&w, &before).unwrap_err(),
            StitchError::UncoveredDate {
                keyword: "cough".into(),
                date: ymd(2020, 3, 14)
            }
        );
        let after = daily(ymd(2020, 3, 20), &[1.0, 2.0, 3.0]);
        assert_eq!(
            calculate_weekly_metrics(&w, &after).unwrap_err(),
            StitchError::UncoveredDate {
                keyword: "cough".into(),
                date: ymd(2020, 3, 22)
            }
        );
        let metrics = calculate_weights(calculate_weekly_metrics(&w, &daily(ymd(2020, 3, 15), &[1.0])).unwrap());
        assert!(rescale_values(&after, &metrics).is_err());
        assert!(rescale_values(&daily(ymd(2020, 3, 15), &[1.0]), &[]).is_err());
    }

    #[test]
    fn rejects_rescaled_input() {
        let w = weekly(ymd(2020, 3, 15), &[50.0]);
        let d = DailySeries::new("cough", ymd(2020, 3, 15), vec![1.0], Scale::Rescaled);
        assert!(matches!(
            calculate_weekly_metrics(&w, &d),
            Err(StitchError::NotRaw { .. })
        ));
        assert!(matches!(rescale_values(&d, &[]), Err(StitchError::NotRaw { .. })));
    }

    #[test]
    fn keyword_mismatch() {
        let w: WeeklySeries<f64> = parse_weekly("2020-03-15,1\n", "fever").unwrap();
        let d = daily(ymd(2020, 3, 15), &[1.0]);
        assert!(matches!(stitch(&d, &w), Err(StitchError::KeywordMismatch { .. })));
    }
}
