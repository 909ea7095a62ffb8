//! Series and dataset types, UCR text ingestion and a synthetic CBF generator.

use std::fmt::Write as _;
use std::ops::Index;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum DataError {
    #[error("series must have at least 2 points, got {0}")]
    TooShort(usize),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("line {line}, column {column}: cannot parse {token:?} as a number")]
    Parse {
        line: usize,
        column: usize,
        token: String,
    },
    #[error("line {line}: expected {expected} values, found {found}")]
    Ragged {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {0}: record has a label but no values")]
    EmptyRecord(usize),
    #[error("dataset contains no series")]
    Empty,
    #[error("dataset needs at least 2 classes, found {0}")]
    TooFewClasses(usize),
    #[error("{series} series but {labels} labels")]
    LabelCount { series: usize, labels: usize },
    #[error("series {index} has length {found}, expected {expected}")]
    LengthMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("label {label} at index {index} is out of range for {n_classes} classes")]
    LabelRange {
        index: usize,
        label: usize,
        n_classes: usize,
    },
    #[error("CBF series length {0} cannot hold the event interval (need at least {min})", min = CBF_MIN_LENGTH)]
    CbfLength(usize),
    #[error("CBF needs at least one series per class")]
    CbfCount,
}

/// A univariate, finite-valued series of fixed length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<T>", into = "Vec<T>")]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct TimeSeries<T> {
    values: Vec<T>,
}

impl<T: Scalar> TimeSeries<T> {
    pub fn new(values: Vec<T>) -> Result<Self, DataError> {
        if values.len() < 2 {
            return Err(DataError::TooShort(values.len()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(DataError::NonFinite(i));
        }
        Ok(Self { values })
    }

    /// Caller guarantees the invariants; checked in debug builds.
    pub(crate) fn from_vec_unchecked(values: Vec<T>) -> Self {
        debug_assert!(values.len() >= 2);
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; present for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Z-normalized copy. A constant series maps to all zeros.
    pub fn z_normalized(&self) -> Self {
        let n = T::of(self.len() as f64);
        let mean = self.values.iter().copied().sum::<T>() / n;
        let var = self
            .values
            .iter()
            .map(|&v| (v - mean) * (v - mean))
            .sum::<T>()
            / n;
        let sd = var.sqrt();
        let values = if sd > T::zero() {
            self.values.iter().map(|&v| (v - mean) / sd).collect()
        } else {
            vec![T::zero(); self.len()]
        };
        Self { values }
    }
}

impl<T: Scalar> TryFrom<Vec<T>> for TimeSeries<T> {
    type Error = DataError;

    fn try_from(values: Vec<T>) -> Result<Self, Self::Error> {
        Self::new(values)
    }
}

impl<T> From<TimeSeries<T>> for Vec<T> {
    fn from(ts: TimeSeries<T>) -> Self {
        ts.values
    }
}

impl<T> Index<usize> for TimeSeries<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.values[i]
    }
}

/// Labelled collection of equal-length series.
///
/// Labels are contiguous ids `0..n_classes`; `class_values[id]` keeps the
/// original label value the id was mapped from.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    series: Vec<TimeSeries<T>>,
    labels: Vec<usize>,
    n_classes: usize,
    class_values: Vec<f64>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(
        series: Vec<TimeSeries<T>>,
        labels: Vec<usize>,
        n_classes: usize,
    ) -> Result<Self, DataError> {
        let class_values = (0..n_classes).map(|c| c as f64).collect();
        Self::with_class_values(series, labels, n_classes, class_values)
    }

    pub fn with_class_values(
        series: Vec<TimeSeries<T>>,
        labels: Vec<usize>,
        n_classes: usize,
        class_values: Vec<f64>,
    ) -> Result<Self, DataError> {
        if series.is_empty() {
            return Err(DataError::Empty);
        }
        if n_classes < 2 {
            return Err(DataError::TooFewClasses(n_classes));
        }
        if series.len() != labels.len() {
            return Err(DataError::LabelCount {
                series: series.len(),
                labels: labels.len(),
            });
        }
        let m = series[0].len();
        if let Some((index, s)) = series.iter().enumerate().find(|(_, s)| s.len() != m) {
            return Err(DataError::LengthMismatch {
                index,
                expected: m,
                found: s.len(),
            });
        }
        if let Some((index, &label)) = labels.iter().enumerate().find(|(_, &l)| l >= n_classes) {
            return Err(DataError::LabelRange {
                index,
                label,
                n_classes,
            });
        }
        debug_assert_eq!(class_values.len(), n_classes);
        Ok(Self {
            series,
            labels,
            n_classes,
            class_values,
        })
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// Common series length `m`.
    pub fn series_len(&self) -> usize {
        self.series[0].len()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn series(&self) -> &[TimeSeries<T>] {
        &self.series
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_values(&self) -> &[f64] {
        &self.class_values
    }

    pub fn z_normalized(&self) -> Self {
        Self {
            series: self.series.iter().map(TimeSeries::z_normalized).collect(),
            ..self.clone()
        }
    }

    /// Serializes in UCR layout: original label, then values, tab separated.
    ///
    /// Values use the shortest representation that parses back to the same
    /// float, so `parse_ucr(to_ucr())` reproduces the dataset exactly.
    pub fn to_ucr(&self) -> String {
        let mut out = String::new();
        for (s, &l) in self.series.iter().zip(&self.labels) {
            let _ = write!(out, "{}", self.class_values[l]);
            for v in s.values() {
                let _ = write!(out, "\t{v}");
            }
            out.push('\n');
        }
        out
    }
}

/// Parses UCR-archive text: one record per line, label first, fields
/// separated by tabs or commas. Blank lines are skipped.
///
/// Labels are remapped to contiguous ids in ascending order of their
/// numeric value.
pub fn parse_ucr<T: Scalar>(text: &str) -> Result<Dataset<T>, DataError> {
    let mut raw_labels = Vec::new();
    let mut series = Vec::new();
    let mut width: Option<usize> = None;

    for (line_no, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line
            .split(['\t', ','])
            .map(str::trim)
            .enumerate()
            .map(|(i, t)| (i + 1, t))
            .filter(|(_, t)| !t.is_empty());

        let parse = |column: usize, token: &str| -> Result<f64, DataError> {
            token
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| DataError::Parse {
                    line: line_no,
                    column,
                    token: token.to_string(),
                })
        };

        let (col, tok) = fields.next().expect("non-blank line has a field");
        raw_labels.push(parse(col, tok)?);
        let values = fields
            .map(|(c, t)| parse(c, t).map(T::of))
            .collect::<Result<Vec<T>, _>>()?;
        if values.is_empty() {
            return Err(DataError::EmptyRecord(line_no));
        }
        match width {
            None => width = Some(values.len()),
            Some(w) if w != values.len() => {
                return Err(DataError::Ragged {
                    line: line_no,
                    expected: w,
                    found: values.len(),
                })
            }
            _ => {}
        }
        series.push(TimeSeries::new(values)?);
    }
    if series.is_empty() {
        return Err(DataError::Empty);
    }

    let mut class_values = raw_labels.clone();
    class_values.sort_by(f64::total_cmp);
    class_values.dedup();
    let labels = raw_labels
        .iter()
        .map(|l| {
            class_values
                .binary_search_by(|c| c.total_cmp(l))
                .expect("label present")
        })
        .collect();
    let n_classes = class_values.len();
    Dataset::with_class_values(series, labels, n_classes, class_values)
}

/// Smallest series length for which every CBF event interval fits.
pub const CBF_MIN_LENGTH: usize = 64;

/// Cylinder-Bell-Funnel shape classes, in label order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CbfShape {
    Cylinder,
    Bell,
    Funnel,
}

impl CbfShape {
    pub const ALL: [CbfShape; 3] = [CbfShape::Cylinder, CbfShape::Bell, CbfShape::Funnel];

    pub fn label(self) -> usize {
        self as usize
    }
}

/// Latent parameters of one generated CBF series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CbfEvent {
    pub shape: CbfShape,
    /// First index of the event interval.
    pub start: usize,
    /// Last index (inclusive) of the event interval.
    pub end: usize,
    /// Event height `6 + eta`.
    pub amplitude: f64,
}

/// Generates a CBF dataset with `n_per_class` series per class.
///
/// Classes are interleaved (cylinder, bell, funnel, cylinder, ...) so any
/// prefix of the dataset is close to balanced.
pub fn generate_cbf<T: Scalar>(
    n_per_class: usize,
    length: usize,
    seed: u64,
) -> Result<Dataset<T>, DataError> {
    generate_cbf_with_events(n_per_class, length, seed).map(|(d, _)| d)
}

/// CBF dataset with exactly `total` series: the first `total` of the
/// interleaved sequence produced with `ceil(total / 3)` series per class.
pub fn generate_cbf_total<T: Scalar>(
    total: usize,
    length: usize,
    seed: u64,
) -> Result<Dataset<T>, DataError> {
    let full = generate_cbf(total.div_ceil(3), length, seed)?;
    Dataset::new(
        full.series[..total].to_vec(),
        full.labels[..total].to_vec(),
        3,
    )
}

/// As [`generate_cbf`], also returning each series' latent event.
pub fn generate_cbf_with_events<T: Scalar>(
    n_per_class: usize,
    length: usize,
    seed: u64,
) -> Result<(Dataset<T>, Vec<CbfEvent>), DataError> {
    if n_per_class == 0 {
        return Err(DataError::CbfCount);
    }
    if length < CBF_MIN_LENGTH {
        return Err(DataError::CbfLength(length));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut series = Vec::with_capacity(3 * n_per_class);
    let mut labels = Vec::with_capacity(3 * n_per_class);
    let mut events = Vec::with_capacity(3 * n_per_class);

    for _ in 0..n_per_class {
        for shape in CbfShape::ALL {
            let start = rng.random_range(16..=32usize);
            let end = (start + rng.random_range(32..=96usize)).min(length - 1);
            let eta: f64 = rng.sample(StandardNormal);
            let amplitude = 6.0 + eta;
            let span = (end - start) as f64;
            let values = (0..length)
                .map(|t| {
                    let noise: f64 = rng.sample(StandardNormal);
                    let event = if (start..=end).contains(&t) {
                        let x = (t - start) as f64;
                        match shape {
                            CbfShape::Cylinder => amplitude,
                            CbfShape::Bell => amplitude * x / span,
                            CbfShape::Funnel => amplitude * (span - x) / span,
                        }
                    } else {
                        0.0
                    };
                    T::of(event + noise)
                })
                .collect();
            series.push(TimeSeries::from_vec_unchecked(values));
            labels.push(shape.label());
            events.push(CbfEvent {
                shape,
                start,
                end,
                amplitude,
            });
        }
    }
    Ok((Dataset::new(series, labels, 3)?, events))
}
