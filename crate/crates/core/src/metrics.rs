//! Counterfactual quality metrics and their per-run aggregation.
//!
//! Pairwise metrics compare a target with one candidate; diversity counts
//! the distinct valid candidates produced for a target. All equality tests
//! are exact, matching the bit-for-bit copying done by the generator.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::classifier::{Classifier, ClassifierError};
use crate::scalar::Scalar;
use crate::timeseries::TimeSeries;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error(
        "target {target_id}: candidate {candidate_id} has length {found}, target has {expected}"
    )]
    LengthMismatch {
        target_id: usize,
        candidate_id: usize,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
}

fn ratio<T: Scalar>(num: T, den: T) -> T {
    if den == T::zero() {
        T::zero()
    } else {
        num / den
    }
}

/// `|c - t|_1 / (|c|_1 + |t|_1)`, zero when both series are zero.
pub fn l1_proximity<T: Scalar>(target: &TimeSeries<T>, candidate: &TimeSeries<T>) -> T {
    let (t, c) = (target.values(), candidate.values());
    let diff = t.iter().zip(c).map(|(&a, &b)| (b - a).abs()).sum::<T>();
    let norms = c.iter().map(|v| v.abs()).sum::<T>() + t.iter().map(|v| v.abs()).sum::<T>();
    ratio(diff, norms)
}

/// `|c - t|_2 / (|c|_2 + |t|_2)`, zero when both series are zero.
pub fn l2_proximity<T: Scalar>(target: &TimeSeries<T>, candidate: &TimeSeries<T>) -> T {
    let (t, c) = (target.values(), candidate.values());
    let norm = |v: &[T]| v.iter().map(|&x| x * x).sum::<T>().sqrt();
    let diff = t
        .iter()
        .zip(c)
        .map(|(&a, &b)| (b - a) * (b - a))
        .sum::<T>()
        .sqrt();
    ratio(diff, norm(c) + norm(t))
}

/// Fraction of positions where the two series differ.
pub fn sparsity<T: Scalar>(target: &TimeSeries<T>, candidate: &TimeSeries<T>) -> T {
    let changed = target
        .values()
        .iter()
        .zip(candidate.values())
        .filter(|(a, b)| a != b)
        .count();
    T::of(changed as f64) / T::of(target.len() as f64)
}

/// 1 when the predicted labels differ, else 0.
pub fn validity<T: Scalar, C: Classifier<T> + ?Sized>(
    target: &TimeSeries<T>,
    candidate: &TimeSeries<T>,
    classifier: &C,
) -> Result<u8, ClassifierError> {
    let labels = classifier.predict(&[target.clone(), candidate.clone()])?;
    Ok(u8::from(labels[0] != labels[1]))
}

/// Number of distinct candidates whose label differs from `target_label`.
pub fn diversity_from_labels<T: Scalar>(
    target_label: usize,
    candidates: &[TimeSeries<T>],
    labels: &[usize],
) -> usize {
    let mut seen: Vec<&TimeSeries<T>> = Vec::new();
    for (c, &l) in candidates.iter().zip(labels) {
        if l != target_label && !seen.contains(&c) {
            seen.push(c);
        }
    }
    seen.len()
}

pub fn diversity<T: Scalar, C: Classifier<T> + ?Sized>(
    target: &TimeSeries<T>,
    candidates: &[TimeSeries<T>],
    classifier: &C,
) -> Result<usize, ClassifierError> {
    if candidates.is_empty() {
        return Ok(0);
    }
    let target_label = classifier.predict_one(target)?.argmax();
    let labels = classifier.predict(candidates)?;
    Ok(diversity_from_labels(target_label, candidates, &labels))
}

/// One explained target and the counterfactuals proposed for it.
#[derive(Debug, Clone)]
pub struct ExplainedTarget<T> {
    pub target_id: usize,
    pub target: TimeSeries<T>,
    pub candidates: Vec<TimeSeries<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRow {
    pub target_id: usize,
    pub candidate_id: usize,
    pub l1_proximity: f64,
    pub l2_proximity: f64,
    pub validity: u8,
    pub sparsity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetDiversity {
    pub target_id: usize,
    pub n_candidates: usize,
    pub diversity: usize,
}

/// Mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    pub fn of(values: impl IntoIterator<Item = f64> + Clone) -> Option<Self> {
        let n = values.clone().into_iter().count();
        if n == 0 {
            return None;
        }
        let mean = values.clone().into_iter().sum::<f64>() / n as f64;
        let var = values.into_iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        Some(Self {
            mean,
            std: var.sqrt(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub n_targets: usize,
    pub n_pairs: usize,
    pub l1_proximity: Option<Stat>,
    pub l2_proximity: Option<Stat>,
    /// Mean of this is the validity rate.
    pub validity: Option<Stat>,
    pub sparsity: Option<Stat>,
    pub diversity: Option<Stat>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub rows: Vec<PairRow>,
    pub diversity: Vec<TargetDiversity>,
    pub summary: Summary,
}

impl MetricReport {
    pub fn validity_rate(&self) -> Option<f64> {
        self.summary.validity.map(|s| s.mean)
    }

    pub const CSV_HEADER: &'static str =
        "target_id,candidate_id,l1_proximity,l2_proximity,validity,sparsity";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.target_id, r.candidate_id, r.l1_proximity, r.l2_proximity, r.validity, r.sparsity
            );
        }
        out
    }
}

/// Scores every (target, candidate) pair and aggregates per metric.
/// Rows follow input order: targets as given, candidates in list order.
pub fn evaluate_run<T: Scalar, C: Classifier<T> + ?Sized>(
    cases: &[ExplainedTarget<T>],
    classifier: &C,
) -> Result<MetricReport, MetricsError> {
    let mut rows = Vec::new();
    let mut diversity = Vec::with_capacity(cases.len());
    for case in cases {
        let m = case.target.len();
        if let Some((candidate_id, c)) = case
            .candidates
            .iter()
            .enumerate()
            .find(|(_, c)| c.len() != m)
        {
            return Err(MetricsError::LengthMismatch {
                target_id: case.target_id,
                candidate_id,
                expected: m,
                found: c.len(),
            });
        }
        let target_label = classifier.predict_one(&case.target)?.argmax();
        let labels = classifier.predict(&case.candidates)?;
        for (candidate_id, (c, &label)) in case.candidates.iter().zip(&labels).enumerate() {
            rows.push(PairRow {
                target_id: case.target_id,
                candidate_id,
                l1_proximity: l1_proximity(&case.target, c).as_f64(),
                l2_proximity: l2_proximity(&case.target, c).as_f64(),
                validity: u8::from(label != target_label),
                sparsity: sparsity(&case.target, c).as_f64(),
            });
        }
        diversity.push(TargetDiversity {
            target_id: case.target_id,
            n_candidates: case.candidates.len(),
            diversity: diversity_from_labels(target_label, &case.candidates, &labels),
        });
    }

    let col = |f: fn(&PairRow) -> f64| Stat::of(rows.iter().map(f));
    let summary = Summary {
        n_targets: cases.len(),
        n_pairs: rows.len(),
        l1_proximity: col(|r| r.l1_proximity),
        l2_proximity: col(|r| r.l2_proximity),
        validity: col(|r| f64::from(r.validity)),
        sparsity: col(|r| r.sparsity),
        diversity: Stat::of(diversity.iter().map(|d| d.diversity as f64)),
    };
    Ok(MetricReport {
        rows,
        diversity,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::ProbVector;

    fn ts(v: &[f64]) -> TimeSeries<f64> {
        TimeSeries::new(v.to_vec()).unwrap()
    }

    /// Label 1 when the first point is negative.
    struct SignOfFirst;

    impl Classifier<f64> for SignOfFirst {
        fn n_classes(&self) -> usize {
            2
        }
        fn series_len(&self) -> usize {
            4
        }
        fn predict_proba(
            &self,
            batch: &[TimeSeries<f64>],
        ) -> Result<Vec<ProbVector<f64>>, ClassifierError> {
            Ok(batch
                .iter()
                .map(|s| {
                    let p = if s[0] < 0.0 {
                        vec![0.0, 1.0]
                    } else {
                        vec![1.0, 0.0]
                    };
                    ProbVector::new(p).unwrap()
                })
                .collect())
        }
    }

    #[test]
    fn proximities_hand_arithmetic() {
        let t = ts(&[1.0, 1.0, 1.0, 1.0]);
        let c = ts(&[1.0, 1.0, 1.0, 3.0]);
        assert!((l1_proximity(&t, &c) - 0.2).abs() < 1e-15);
        assert!((l2_proximity(&t, &c) - 2.0 / (2.0 + 12f64.sqrt())).abs() < 1e-15);
        assert_eq!(l1_proximity(&t, &t), 0.0);
        let neg = ts(&[-1.0, -1.0, -1.0, -1.0]);
        assert_eq!(l1_proximity(&t, &neg), 1.0);
        assert_eq!(l2_proximity(&t, &neg), 1.0);
        let z = ts(&[0.0, 0.0]);
        assert_eq!(l1_proximity(&z, &z), 0.0);
        assert_eq!(l2_proximity(&z, &z), 0.0);
    }

    #[test]
    fn sparsity_counts_changed_points() {
        let t = TimeSeries::new((0..100).map(f64::from).collect()).unwrap();
        let mut v = t.values().to_vec();
        for x in v.iter_mut().step_by(10) {
            *x += 0.5;
        }
        assert_eq!(sparsity(&t, &TimeSeries::new(v).unwrap()), 0.1);
        assert_eq!(sparsity(&t, &t), 0.0);
    }

    #[test]
    fn validity_on_constructed_flip() {
        let t = ts(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(validity(&t, &t, &SignOfFirst).unwrap(), 0);
        assert_eq!(
            validity(&t, &ts(&[-1.0, 2.0, 3.0, 4.0]), &SignOfFirst).unwrap(),
            1
        );
    }

    #[test]
    fn diversity_counts_distinct_valid() {
        let t = ts(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(diversity(&t, &[], &SignOfFirst).unwrap(), 0);
        let a = ts(&[-1.0, 2.0, 3.0, 4.0]);
        assert_eq!(
            diversity(&t, &[a.clone(), a.clone()], &SignOfFirst).unwrap(),
            1
        );
        let b = ts(&[-2.0, 2.0, 3.0, 4.0]);
        let invalid = ts(&[5.0, 2.0, 3.0, 4.0]);
        assert_eq!(diversity(&t, &[a, invalid, b], &SignOfFirst).unwrap(), 2);
    }

    #[test]
    fn single_pair_report() {
        let t = ts(&[1.0, 2.0, 3.0, 4.0]);
        let c = ts(&[-1.0, 2.0, 3.0, 4.0]);
        let report = evaluate_run(
            &[ExplainedTarget {
                target_id: 7,
                target: t,
                candidates: vec![c],
            }],
            &SignOfFirst,
        )
        .unwrap();
        assert_eq!(report.rows.len(), 1);
        let s = report.summary.clone();
        assert_eq!(
            s.validity.unwrap(),
            Stat {
                mean: 1.0,
                std: 0.0
            }
        );
        assert_eq!(
            s.sparsity.unwrap(),
            Stat {
                mean: 0.25,
                std: 0.0
            }
        );
        assert_eq!(s.diversity.unwrap().mean, 1.0);
        assert!(report.to_csv().starts_with(MetricReport::CSV_HEADER));
    }

    #[test]
    fn length_mismatch_is_reported() {
        let err = evaluate_run(
            &[ExplainedTarget {
                target_id: 0,
                target: ts(&[1.0, 2.0, 3.0, 4.0]),
                candidates: vec![ts(&[1.0, 2.0])],
            }],
            &SignOfFirst,
        )
        .unwrap_err();
        assert!(matches!(err, MetricsError::LengthMismatch { found: 2, .. }));
    }
}
