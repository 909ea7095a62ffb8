//! The two minimized objectives of a counterfactual candidate.
//!
//! `f1` is the classifier-space distance to the nearest reference, or
//! [`NON_FLIP_PENALTY`] when the candidate keeps the target's label. `f2`
//! averages the fraction of changed points and the relative L2 change.

use serde::{Deserialize, Serialize};

use crate::classifier::{Classifier, ClassifierError, ProbVector};
use crate::metrics::{l2_proximity, sparsity};
use crate::reference::{js_distance, ReferenceSet, SAME_LABEL_DISTANCE};
use crate::scalar::Scalar;
use crate::timeseries::TimeSeries;

/// `f1` of a candidate whose predicted label equals the target's.
pub const NON_FLIP_PENALTY: f64 = SAME_LABEL_DISTANCE;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct ObjectivePair<T> {
    pub f1: T,
    pub f2: T,
}

impl<T: Scalar> ObjectivePair<T> {
    pub fn new(f1: T, f2: T) -> Self {
        Self { f1, f2 }
    }

    /// Pareto dominance under minimization.
    pub fn dominates(&self, other: &Self) -> bool {
        self.f1 <= other.f1 && self.f2 <= other.f2 && (self.f1 < other.f1 || self.f2 < other.f2)
    }

    /// The candidate changed the predicted label.
    pub fn is_valid(&self) -> bool {
        self.f1 < T::of(NON_FLIP_PENALTY)
    }
}

/// `f1` from an already computed candidate prediction.
pub fn f1_from_probs<T: Scalar>(candidate: &ProbVector<T>, refs: &ReferenceSet<T>) -> T {
    if candidate.argmax() == refs.target_label() {
        return T::of(NON_FLIP_PENALTY);
    }
    refs.members
        .iter()
        .map(|r| js_distance(candidate, &r.probs).expect("classifier output has fixed width"))
        .fold(T::infinity(), T::min)
}

pub fn f1<T: Scalar, C: Classifier<T> + ?Sized>(
    candidate: &TimeSeries<T>,
    refs: &ReferenceSet<T>,
    classifier: &C,
) -> Result<T, ClassifierError> {
    Ok(f1_from_probs(&classifier.predict_one(candidate)?, refs))
}

/// Mean of the changed-point fraction and the relative L2 change.
pub fn f2<T: Scalar>(candidate: &TimeSeries<T>, target: &TimeSeries<T>) -> T {
    (sparsity(target, candidate) + l2_proximity(target, candidate)) * T::of(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::Reference;

    fn ts(v: &[f64]) -> TimeSeries<f64> {
        TimeSeries::new(v.to_vec()).unwrap()
    }

    fn pv(p: &[f64]) -> ProbVector<f64> {
        ProbVector::new(p.to_vec()).unwrap()
    }

    fn refs(target: &[f64], members: &[&[f64]]) -> ReferenceSet<f64> {
        ReferenceSet {
            target_probs: pv(target),
            members: members
                .iter()
                .enumerate()
                .map(|(i, p)| Reference {
                    pool_index: i,
                    series: ts(&[0.0, 0.0]),
                    probs: pv(p),
                    distance: js_distance(&pv(target), &pv(p)).unwrap(),
                })
                .collect(),
            requested: members.len(),
        }
    }

    #[test]
    fn f2_hand_arithmetic() {
        let target = ts(&[1.0, 1.0, 1.0, 1.0]);
        let cand = ts(&[1.0, 1.0, 1.0, 3.0]);
        let l2 = 2.0 / (2.0 + 12f64.sqrt());
        assert!((l2 - 0.3660).abs() < 1e-4);
        let got = f2(&cand, &target);
        assert!((got - (0.25 + l2) / 2.0).abs() < 1e-15);
        assert!((got - 0.3080).abs() < 1e-4);
    }

    #[test]
    fn f2_bounds() {
        let t = ts(&[1.0, -2.0, 3.0]);
        assert_eq!(f2(&t, &t), 0.0);
        let neg = ts(&[-1.0, 2.0, -3.0]);
        assert_eq!(f2(&neg, &t), 1.0);
        let zero = ts(&[0.0, 0.0]);
        assert_eq!(f2(&zero, &zero), 0.0);
    }

    #[test]
    fn f1_penalizes_unflipped_and_takes_min_over_refs() {
        let r = refs(&[0.9, 0.1], &[&[0.2, 0.8], &[0.05, 0.95]]);
        assert_eq!(f1_from_probs(&pv(&[0.6, 0.4]), &r), NON_FLIP_PENALTY);
        assert_eq!(f1_from_probs(&pv(&[0.2, 0.8]), &r), 0.0);
        let c = pv(&[0.3, 0.7]);
        let d0 = js_distance(&c, &pv(&[0.2, 0.8])).unwrap();
        let d1 = js_distance(&c, &pv(&[0.05, 0.95])).unwrap();
        assert_eq!(f1_from_probs(&c, &r), d0.min(d1));
    }

    #[test]
    fn dominance() {
        let a = ObjectivePair::new(0.1, 0.2);
        assert!(a.dominates(&ObjectivePair::new(0.1, 0.3)));
        assert!(!a.dominates(&a));
        assert!(!a.dominates(&ObjectivePair::new(0.0, 0.5)));
    }
}
