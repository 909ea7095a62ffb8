use rayon::prelude::*;

use super::{check_lengths, Classifier, ClassifierError, ProbVector};
use crate::scalar::Scalar;
use crate::timeseries::{Dataset, TimeSeries};

/// Nearest-neighbour classifier with softmax-over-distance probabilities.
///
/// For each class the score is the mean Euclidean distance to that class's
/// `k_neighbors` nearest training series (all of them when the class is
/// smaller); probabilities are `softmax(-score / temperature)`. A class with
/// no training members gets probability zero.
#[derive(Debug, Clone)]
pub struct KnnSoftmax<T> {
    train: Vec<TimeSeries<T>>,
    labels: Vec<usize>,
    n_classes: usize,
    series_len: usize,
    k_neighbors: usize,
    temperature: T,
}

impl<T: Scalar> KnnSoftmax<T> {
    pub fn fit(
        train: &Dataset<T>,
        k_neighbors: usize,
        temperature: T,
    ) -> Result<Self, ClassifierError> {
        if train.is_empty() {
            return Err(ClassifierError::EmptyTrainingSet);
        }
        if k_neighbors == 0 || k_neighbors > train.len() {
            return Err(ClassifierError::InvalidParameter(format!(
                "k_neighbors = {k_neighbors} must be in 1..={}",
                train.len()
            )));
        }
        if !(temperature.is_finite() && temperature > T::zero()) {
            return Err(ClassifierError::InvalidParameter(format!(
                "temperature = {temperature} must be positive"
            )));
        }
        Ok(Self {
            train: train.series().to_vec(),
            labels: train.labels().to_vec(),
            n_classes: train.n_classes(),
            series_len: train.series_len(),
            k_neighbors,
            temperature,
        })
    }

    pub fn k_neighbors(&self) -> usize {
        self.k_neighbors
    }

    pub fn temperature(&self) -> T {
        self.temperature
    }

    /// Per-class mean distance to the k nearest members (`inf` if none).
    pub fn class_distances(&self, query: &TimeSeries<T>) -> Vec<T> {
        let mut per_class: Vec<Vec<T>> = vec![Vec::new(); self.n_classes];
        for (s, &l) in self.train.iter().zip(&self.labels) {
            per_class[l].push(euclidean(query.values(), s.values()));
        }
        per_class
            .into_iter()
            .map(|mut d| {
                if d.is_empty() {
                    return T::infinity();
                }
                d.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
                let take = self.k_neighbors.min(d.len());
                d[..take].iter().copied().sum::<T>() / T::of(take as f64)
            })
            .collect()
    }

    fn predict_single(&self, query: &TimeSeries<T>) -> ProbVector<T> {
        let dist = self.class_distances(query);
        let nearest = dist.iter().copied().fold(T::infinity(), T::min);
        let weights: Vec<T> = dist
            .iter()
            .map(|&d| (-(d - nearest) / self.temperature).exp())
            .collect();
        let total = weights.iter().copied().sum::<T>();
        ProbVector::from_vec_unchecked(weights.into_iter().map(|w| w / total).collect())
    }
}

fn euclidean<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<T>()
        .sqrt()
}

impl<T: Scalar> Classifier<T> for KnnSoftmax<T> {
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn series_len(&self) -> usize {
        self.series_len
    }

    fn predict_proba(
        &self,
        batch: &[TimeSeries<T>],
    ) -> Result<Vec<ProbVector<T>>, ClassifierError> {
        check_lengths(batch, self.series_len)?;
        Ok(batch.par_iter().map(|s| self.predict_single(s)).collect())
    }
}
