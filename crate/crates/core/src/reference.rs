//! Distance between series as seen by the classifier, and reference selection.
//!
//! The distance between two series is the Jensen-Shannon distance (base-2
//! logarithms, so bounded by 1) between their predicted class
//! distributions. References for a target are the pool members predicted to
//! a different class that are closest to the target under that distance.

use thiserror::Error;

use crate::classifier::{Classifier, ClassifierError, ProbVector};
use crate::scalar::Scalar;
use crate::timeseries::{Dataset, TimeSeries};

/// Distance assigned to pool members predicted to the target's own class.
/// Strictly above the largest possible Jensen-Shannon distance.
pub const SAME_LABEL_DISTANCE: f64 = 1.01;

#[derive(Debug, Error, PartialEq)]
#[error("probability vectors have different lengths ({0} vs {1})")]
pub struct LengthMismatch(pub usize, pub usize);

/// Jensen-Shannon distance with base-2 logarithms, in `[0, 1]`.
///
/// Terms with zero probability contribute nothing.
pub fn js_distance<T: Scalar>(p: &ProbVector<T>, q: &ProbVector<T>) -> Result<T, LengthMismatch> {
    js_distance_slices(p.probs(), q.probs())
}

pub(crate) fn js_distance_slices<T: Scalar>(p: &[T], q: &[T]) -> Result<T, LengthMismatch> {
    if p.len() != q.len() {
        return Err(LengthMismatch(p.len(), q.len()));
    }
    let half = T::of(0.5);
    let mut kl_p = T::zero();
    let mut kl_q = T::zero();
    for (&a, &b) in p.iter().zip(q) {
        let mid = (a + b) * half;
        if a > T::zero() {
            kl_p = kl_p + a * (a / mid).log2();
        }
        if b > T::zero() {
            kl_q = kl_q + b * (b / mid).log2();
        }
    }
    let div = (kl_p + kl_q) * half;
    Ok(div.max(T::zero()).sqrt().min(T::one()))
}

/// A pool member chosen as a reference.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference<T> {
    /// Index of the member in the pool it was drawn from.
    pub pool_index: usize,
    pub series: TimeSeries<T>,
    pub probs: ProbVector<T>,
    pub distance: T,
}

/// References for one target, ascending by distance.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSet<T> {
    pub target_probs: ProbVector<T>,
    pub members: Vec<Reference<T>>,
    /// Number of references asked for.
    pub requested: usize,
}

impl<T: Scalar> ReferenceSet<T> {
    pub fn target_label(&self) -> usize {
        self.target_probs.argmax()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Fewer than the requested number of pool members changed the label.
    pub fn is_degenerate(&self) -> bool {
        self.members.len() < self.requested
    }
}

/// Classifier distance from `target_probs` to every pool prediction;
/// members sharing the target's label get [`SAME_LABEL_DISTANCE`].
pub fn classifier_distances<T: Scalar>(
    target_probs: &ProbVector<T>,
    pool_probs: &[ProbVector<T>],
) -> Result<Vec<T>, LengthMismatch> {
    let target_label = target_probs.argmax();
    pool_probs
        .iter()
        .map(|p| {
            if p.argmax() == target_label {
                Ok(T::of(SAME_LABEL_DISTANCE))
            } else {
                js_distance(target_probs, p)
            }
        })
        .collect()
}

/// Picks the `k` pool members closest to `target` in classifier space among
/// those predicted to a different class. Ties go to the lower pool index.
/// Returns fewer than `k` members (a degenerate set) when not enough qualify.
pub fn select_references<T: Scalar, C: Classifier<T> + ?Sized>(
    target: &TimeSeries<T>,
    pool: &Dataset<T>,
    classifier: &C,
    k: usize,
) -> Result<ReferenceSet<T>, ClassifierError> {
    let target_probs = classifier.predict_one(target)?;
    let pool_probs = classifier.predict_proba(pool.series())?;
    let distances = classifier_distances(&target_probs, &pool_probs)
        .map_err(|e| ClassifierError::Protocol(e.to_string()))?;

    let sentinel = T::of(SAME_LABEL_DISTANCE);
    let mut order: Vec<usize> = (0..pool.len())
        .filter(|&i| distances[i] < sentinel)
        .collect();
    // stable: equal distances keep ascending pool order
    order.sort_by(|&a, &b| distances[a].partial_cmp(&distances[b]).expect("finite"));
    order.truncate(k);

    let members = order
        .into_iter()
        .map(|i| Reference {
            pool_index: i,
            series: pool.series()[i].clone(),
            probs: pool_probs[i].clone(),
            distance: distances[i],
        })
        .collect();
    Ok(ReferenceSet {
        target_probs,
        members,
        requested: k,
    })
}
