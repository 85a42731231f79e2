//! Distance correlation and rolling keyword×keyword correlation frames.

use chrono::NaiveDate;
use rayon::prelude::*;
use thiserror::Error;

use crate::num::{format_significant, Scalar};
use crate::series::{add_days, DailySeries, DateSpan};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorrelationError {
    #[error("vectors differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("distance correlation needs at least 2 observations, got {0}")]
    TooShort(usize),
    #[error("non-finite input value")]
    NonFiniteInput,
    #[error("series `{keyword}` spans {found}, expected to cover {required}")]
    MisalignedSeries {
        keyword: String,
        found: DateSpan,
        required: DateSpan,
    },
    #[error("window of {window} days exceeds the {available} days available")]
    WindowTooLong { window: usize, available: usize },
    #[error("no series to correlate")]
    NoSeries,
}

/// Double-centred pairwise distance matrix of one sample.
///
/// Building this once per (keyword, window) lets every pair in a frame reuse it.
#[derive(Debug, Clone)]
pub struct CenteredDistances<T> {
    n: usize,
    centered: Vec<T>,
    dvar2: T,
}

impl<T: Scalar> CenteredDistances<T> {
    pub fn new(x: &[T]) -> Result<Self, CorrelationError> {
        let n = x.len();
        if n < 2 {
            return Err(CorrelationError::TooShort(n));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(CorrelationError::NonFiniteInput);
        }
        let nf = T::from_usize_lossy(n);
        let mut centered = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                centered[i * n + j] = (x[i] - x[j]).abs();
            }
        }
        // Symmetric, so row means double as column means.
        let row_means: Vec<T> = centered
            .chunks_exact(n)
            .map(|row| row.iter().fold(T::zero(), |acc, &v| acc + v) / nf)
            .collect();
        let grand = row_means.iter().fold(T::zero(), |acc, &v| acc + v) / nf;
        for i in 0..n {
            for j in 0..n {
                let v = &mut centered[i * n + j];
                *v = *v - row_means[i] - row_means[j] + grand;
            }
        }
        let mut out = Self {
            n,
            centered,
            dvar2: T::zero(),
        };
        out.dvar2 = out.dcov2_unchecked(&out);
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Squared distance variance, `dCov²(x, x)`.
    pub fn dvar2(&self) -> T {
        self.dvar2
    }

    fn dcov2_unchecked(&self, other: &Self) -> T {
        let nf = T::from_usize_lossy(self.n);
        let sum = self
            .centered
            .iter()
            .zip(&other.centered)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b);
        sum / (nf * nf)
    }

    /// Squared sample distance covariance.
    pub fn dcov2(&self, other: &Self) -> Result<T, CorrelationError> {
        if self.n != other.n {
            return Err(CorrelationError::LengthMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(self.dcov2_unchecked(other))
    }

    /// Distance correlation in `[0, 1]`; 0 when either sample is constant.
    pub fn dcor(&self, other: &Self) -> Result<T, CorrelationError> {
        let dcov2 = self.dcov2(other)?;
        if self.dvar2 <= T::zero() || other.dvar2 <= T::zero() {
            return Ok(T::zero());
        }
        let dcov2 = dcov2.max(T::zero());
        let r2 = dcov2 / (self.dvar2 * other.dvar2).sqrt();
        Ok(r2.sqrt().min(T::one()))
    }
}

/// Sample distance correlation of two equal-length vectors.
///
/// Uses the V-statistic: pairwise absolute differences, double centring,
/// `dCov² = mean(A∘B)` and `dCor = dCov / sqrt(dVar_x · dVar_y)`.
/// Constant inputs have zero distance variance and yield 0.
pub fn distance_correlation<T: Scalar>(x: &[T], y: &[T]) -> Result<T, CorrelationError> {
    if x.len() != y.len() {
        return Err(CorrelationError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    CenteredDistances::new(x)?.dcor(&CenteredDistances::new(y)?)
}

/// Dense symmetric `K×K` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T> {
    size: usize,
    data: Vec<T>,
}

impl<T: Scalar> SymMatrix<T> {
    pub fn identity(size: usize) -> Self {
        let mut data = vec![T::zero(); size * size];
        for i in 0..size {
            data[i * size + i] = T::one();
        }
        Self { size, data }
    }

    /// Builds from a full row-major matrix. Returns `None` unless square.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Option<Self> {
        let size = rows.len();
        if rows.iter().any(|r| r.len() != size) {
            return None;
        }
        Some(Self {
            size,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.size + j]
    }

    /// Writes both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.size + j] = value;
        self.data[j * self.size + i] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.size..(i + 1) * self.size]
    }
}

/// Correlation matrix for one label date.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationFrame<T> {
    pub label_date: NaiveDate,
    pub window_days: usize,
    pub matrix: SymMatrix<T>,
}

impl<T: Scalar> CorrelationFrame<T> {
    /// Symmetric, unit diagonal, entries in `[0, 1]`, all within `tol`.
    pub fn satisfies_invariants(&self, tol: T) -> bool {
        let k = self.matrix.size();
        (0..k).all(|i| {
            (self.matrix.get(i, i) - T::one()).abs() <= tol
                && (0..k).all(|j| {
                    let v = self.matrix.get(i, j);
                    v == self.matrix.get(j, i) && v >= -tol && v <= T::one() + tol
                })
        })
    }
}

/// Frames for every label date of a rolling window over `span`.
///
/// The frame labelled `t` is computed from the `window_days` days strictly
/// before `t`, so the first label is `span.start + window_days` and the last
/// is the day after `span.end`. `series` order fixes matrix indices.
pub fn rolling_correlation<T: Scalar>(
    series: &[DailySeries<T>],
    window_days: usize,
    span: DateSpan,
) -> Result<Vec<CorrelationFrame<T>>, CorrelationError> {
    if series.is_empty() {
        return Err(CorrelationError::NoSeries);
    }
    let days = span.days();
    if window_days > days {
        return Err(CorrelationError::WindowTooLong {
            window: window_days,
            available: days,
        });
    }
    if window_days < 2 {
        return Err(CorrelationError::TooShort(window_days));
    }
    let slices: Vec<&[T]> = series
        .iter()
        .map(|s| {
            let covered = s.start() <= span.start && s.end() >= span.end;
            if !covered {
                return Err(CorrelationError::MisalignedSeries {
                    keyword: s.keyword().to_string(),
                    found: s.span(),
                    required: span,
                });
            }
            let offset = (span.start - s.start()).num_days() as usize;
            Ok(&s.values()[offset..offset + days])
        })
        .collect::<Result<_, _>>()?;
    if slices.iter().flat_map(|s| s.iter()).any(|v| !v.is_finite()) {
        return Err(CorrelationError::NonFiniteInput);
    }

    let k = slices.len();
    (0..=days - window_days)
        .into_par_iter()
        .map(|offset| {
            let centered: Vec<CenteredDistances<T>> = slices
                .iter()
                .map(|s| CenteredDistances::new(&s[offset..offset + window_days]))
                .collect::<Result<_, _>>()?;
            let mut matrix = SymMatrix::identity(k);
            for i in 0..k {
                for j in i + 1..k {
                    matrix.set(i, j, centered[i].dcor(&centered[j])?);
                }
            }
            Ok(CorrelationFrame {
                label_date: add_days(span.start, (offset + window_days) as u64),
                window_days,
                matrix,
            })
        })
        .collect()
}

/// Long-format `label_date,keyword_a,keyword_b,dcor` over the upper triangle,
/// values at 12 significant digits.
pub fn to_long_csv<T: Scalar>(keywords: &[String], frames: &[CorrelationFrame<T>]) -> String {
    let mut out = String::from("label_date,keyword_a,keyword_b,dcor\n");
    for frame in frames {
        for i in 0..keywords.len() {
            for j in i + 1..keywords.len() {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    frame.label_date,
                    keywords[i],
                    keywords[j],
                    format_significant(frame.matrix.get(i, j).as_f64(), 12)
                ));
            }
        }
    }
    out
}
