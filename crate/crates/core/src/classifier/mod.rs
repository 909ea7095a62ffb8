//! The probabilistic classifier contract and its implementations.
//!
//! Every classifier maps a batch of series of its trained length to one
//! [`ProbVector`] per series. Labels are compared through
//! [`ProbVector::argmax`], which breaks ties towards the lowest class id.

mod external;
mod knn;

pub use external::ExternalClassifier;
pub use knn::KnnSoftmax;

use serde::Serialize;
use thiserror::Error;

use crate::scalar::Scalar;
use crate::timeseries::TimeSeries;

/// Tolerance on `sum(p) == 1` for a [`ProbVector`], widened to a few ulps
/// per entry when the scalar type is coarser than that.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("series {index} has length {found}, classifier expects {expected}")]
    LengthMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("invalid classifier parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("transport error: {0}")]
    Transport(String),
}

/// A probability distribution over class ids.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct ProbVector<T> {
    probs: Vec<T>,
}

impl<T: Scalar> ProbVector<T> {
    /// Validates entries in `[0, 1]` and a sum within
    /// [`NORMALIZATION_TOLERANCE`] of one.
    pub fn new(probs: Vec<T>) -> Result<Self, ClassifierError> {
        let rounding = 4.0 * probs.len() as f64 * T::epsilon().as_f64();
        Self::with_tolerance(probs, NORMALIZATION_TOLERANCE.max(rounding))
    }

    pub(crate) fn with_tolerance(probs: Vec<T>, tol: f64) -> Result<Self, ClassifierError> {
        if probs.is_empty() {
            return Err(ClassifierError::InvalidProbabilities("empty vector".into()));
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !(p.is_finite() && **p >= T::zero() && **p <= T::one()))
        {
            return Err(ClassifierError::InvalidProbabilities(format!(
                "entry {i} = {p} outside [0, 1]"
            )));
        }
        let sum = probs.iter().copied().sum::<T>().as_f64();
        if (sum - 1.0).abs() > tol {
            return Err(ClassifierError::InvalidProbabilities(format!(
                "entries sum to {sum}"
            )));
        }
        Ok(Self { probs })
    }

    pub(crate) fn from_vec_unchecked(probs: Vec<T>) -> Self {
        debug_assert!(Self::new(probs.clone()).is_ok());
        Self { probs }
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn n_classes(&self) -> usize {
        self.probs.len()
    }

    /// Predicted label; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate().skip(1) {
            if p > self.probs[best] {
                best = i;
            }
        }
        best
    }
}

/// Anything that maps series to class-probability vectors.
pub trait Classifier<T: Scalar>: Send + Sync {
    fn n_classes(&self) -> usize;

    /// Series length the classifier accepts.
    fn series_len(&self) -> usize;

    fn predict_proba(&self, batch: &[TimeSeries<T>])
        -> Result<Vec<ProbVector<T>>, ClassifierError>;

    fn predict(&self, batch: &[TimeSeries<T>]) -> Result<Vec<usize>, ClassifierError> {
        Ok(self
            .predict_proba(batch)?
            .iter()
            .map(ProbVector::argmax)
            .collect())
    }

    fn predict_one(&self, series: &TimeSeries<T>) -> Result<ProbVector<T>, ClassifierError> {
        let mut out = self.predict_proba(std::slice::from_ref(series))?;
        Ok(out.pop().expect("one prediction per input"))
    }
}

impl<T: Scalar, C: Classifier<T> + ?Sized> Classifier<T> for Box<C> {
    fn n_classes(&self) -> usize {
        (**self).n_classes()
    }

    fn series_len(&self) -> usize {
        (**self).series_len()
    }

    fn predict_proba(
        &self,
        batch: &[TimeSeries<T>],
    ) -> Result<Vec<ProbVector<T>>, ClassifierError> {
        (**self).predict_proba(batch)
    }
}

pub(crate) fn check_lengths<T: Scalar>(
    batch: &[TimeSeries<T>],
    expected: usize,
) -> Result<(), ClassifierError> {
    match batch.iter().enumerate().find(|(_, s)| s.len() != expected) {
        Some((index, s)) => Err(ClassifierError::LengthMismatch {
            index,
            expected,
            found: s.len(),
        }),
        None => Ok(()),
    }
}
