//! The counterfactual search loop: a customised NSGA-II over subsequence
//! chromosomes.
//!
//! Each generation produces `2N` offspring by binary tournament, interval
//! crossover and length mutation, expands every offspring into one
//! chromosome per reference, and keeps the best `N` of parents plus
//! expanded offspring by Pareto rank and crowding distance.

mod operators;
mod sorting;

pub use operators::{
    crossover, expand, init_population, length_success_probability, mutate, sample_length,
    tournament_select, tournament_winner, Chromosome,
};
pub use sorting::{fast_nondominated_sort, select_survivors, FrontPartition};

use std::collections::HashMap;

use log::debug;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{Classifier, ClassifierError, ProbVector};
use crate::objectives::{f1_from_probs, f2, ObjectivePair};
use crate::reference::{select_references, ReferenceSet};
use crate::scalar::Scalar;
use crate::soigen::generate;
use crate::timeseries::{Dataset, TimeSeries};

#[derive(Debug, Error)]
pub enum ExplainError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("target has length {target}, pool has {pool} and classifier expects {classifier}")]
    LengthMismatch {
        target: usize,
        pool: usize,
        classifier: usize,
    },
    #[error("no pool member is predicted to a class other than the target's ({label})")]
    NoReferences { label: usize },
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
}

fn default_pop_size() -> usize {
    50
}
fn default_generations() -> usize {
    50
}
fn default_probability() -> f64 {
    0.7
}
fn default_references() -> usize {
    4
}
fn default_tau() -> Option<f64> {
    Some(0.4)
}
fn default_ar_order() -> usize {
    4
}

/// Search hyperparameters. Missing JSON fields take the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_pop_size")]
    pub pop_size: usize,
    #[serde(default = "default_generations")]
    pub generations: usize,
    #[serde(default = "default_probability")]
    pub p_crossover: f64,
    #[serde(default = "default_probability")]
    pub p_mutation: f64,
    /// Number of references `K`.
    #[serde(default = "default_references", alias = "k")]
    pub n_references: usize,
    /// Tolerable subsequence-length ratio; `null` disables length steering.
    #[serde(default = "default_tau")]
    pub tau: Option<f64>,
    #[serde(default = "default_ar_order")]
    pub ar_order: usize,
    #[serde(default)]
    pub seed: u64,
    /// Reuse candidates of chromosomes already evaluated in this run.
    #[serde(default)]
    pub cache_candidates: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            pop_size: default_pop_size(),
            generations: default_generations(),
            p_crossover: default_probability(),
            p_mutation: default_probability(),
            n_references: default_references(),
            tau: default_tau(),
            ar_order: default_ar_order(),
            seed: 0,
            cache_candidates: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ExplainError> {
        let fail = |m: String| Err(ExplainError::Config(m));
        if self.pop_size < 2 || !self.pop_size.is_multiple_of(2) {
            return fail(format!(
                "pop_size = {} must be even and >= 2",
                self.pop_size
            ));
        }
        if self.generations < 1 {
            return fail("generations must be >= 1".into());
        }
        for (name, p) in [
            ("p_crossover", self.p_crossover),
            ("p_mutation", self.p_mutation),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("{name} = {p} outside [0, 1]"));
            }
        }
        if self.n_references < 1 {
            return fail("n_references must be >= 1".into());
        }
        if let Some(tau) = self.tau {
            if !(tau > 0.0 && tau < 1.0) {
                return fail(format!("tau = {tau} outside (0, 1)"));
            }
        }
        if self.ar_order < 1 {
            return fail("ar_order must be >= 1".into());
        }
        Ok(())
    }
}

/// An evaluated chromosome with its counterfactual series.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct Candidate<T> {
    pub chrom: Chromosome,
    pub series: TimeSeries<T>,
    pub objectives: ObjectivePair<T>,
}

/// Reference used during a run, identified by its pool index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct ReferenceInfo<T> {
    pub pool_index: usize,
    pub distance: T,
}

/// Outcome of one explanation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct ExplainResult<T> {
    pub target_label: usize,
    pub target_probs: ProbVector<T>,
    pub references: Vec<ReferenceInfo<T>>,
    /// Fewer references than requested qualified.
    pub degenerate_references: bool,
    /// Non-dominated members of the final population that change the
    /// predicted label, ascending by `(f1, f2)`.
    pub candidates: Vec<Candidate<T>>,
    /// Non-dominated members dropped because they keep the target's label.
    pub dropped_unflipped: usize,
    /// Candidate generations performed (cache hits excluded).
    pub evaluations: usize,
}

struct Evaluator<'a, T: Scalar, C: ?Sized> {
    target: &'a TimeSeries<T>,
    refs: &'a ReferenceSet<T>,
    classifier: &'a C,
    ar_order: usize,
    cache: Option<HashMap<Chromosome, Candidate<T>>>,
    evaluations: usize,
}

impl<T: Scalar, C: Classifier<T> + ?Sized> Evaluator<'_, T, C> {
    fn evaluate(&mut self, chroms: Vec<Chromosome>) -> Result<Vec<Candidate<T>>, ClassifierError> {
        let mut out: Vec<Option<Candidate<T>>> = match &self.cache {
            Some(cache) => chroms.iter().map(|c| cache.get(c).cloned()).collect(),
            None => vec![None; chroms.len()],
        };
        let todo: Vec<usize> = (0..chroms.len()).filter(|&i| out[i].is_none()).collect();
        let series: Vec<TimeSeries<T>> = todo
            .par_iter()
            .map(|&i| generate(self.target, &chroms[i], self.refs, self.ar_order))
            .collect();
        let probs = self.classifier.predict_proba(&series)?;
        self.evaluations += todo.len();

        for ((i, series), probs) in todo.into_iter().zip(series).zip(probs) {
            let objectives =
                ObjectivePair::new(f1_from_probs(&probs, self.refs), f2(&series, self.target));
            let cand = Candidate {
                chrom: chroms[i],
                series,
                objectives,
            };
            if let Some(cache) = &mut self.cache {
                cache.insert(cand.chrom, cand.clone());
            }
            out[i] = Some(cand);
        }
        Ok(out
            .into_iter()
            .map(|c| c.expect("every slot filled"))
            .collect())
    }
}

fn objectives_of<T: Scalar>(pop: &[Candidate<T>]) -> Vec<ObjectivePair<T>> {
    pop.iter().map(|c| c.objectives).collect()
}

/// Searches for Pareto-optimal counterfactuals of `target`.
///
/// References come from `pool`; the returned candidates are the
/// non-dominated, label-changing members of the final population.
pub fn run_explain<T: Scalar, C: Classifier<T> + ?Sized>(
    target: &TimeSeries<T>,
    classifier: &C,
    pool: &Dataset<T>,
    config: &RunConfig,
) -> Result<ExplainResult<T>, ExplainError> {
    config.validate()?;
    let m = target.len();
    if pool.series_len() != m || classifier.series_len() != m {
        return Err(ExplainError::LengthMismatch {
            target: m,
            pool: pool.series_len(),
            classifier: classifier.series_len(),
        });
    }

    let refs = select_references(target, pool, classifier, config.n_references)?;
    if refs.is_empty() {
        return Err(ExplainError::NoReferences {
            label: refs.target_label(),
        });
    }
    let k = refs.len();
    let n = config.pop_size;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut evaluator = Evaluator {
        target,
        refs: &refs,
        classifier,
        ar_order: config.ar_order,
        cache: config.cache_candidates.then(HashMap::new),
        evaluations: 0,
    };

    let mut population = evaluator.evaluate(init_population(n, m, k, &mut rng))?;
    let initial = fast_nondominated_sort(&objectives_of(&population));
    let (mut rank, mut crowding) = (initial.rank, initial.crowding);

    for generation in 0..config.generations {
        let mut offspring = Vec::with_capacity(2 * n);
        for _ in 0..n {
            let a = tournament_select(&rank, &crowding, &mut rng);
            let b = tournament_select(&rank, &crowding, &mut rng);
            let (y1, y2) = crossover(
                &population[a].chrom,
                &population[b].chrom,
                config.p_crossover,
                &mut rng,
            );
            offspring.push(y1);
            offspring.push(y2);
        }
        for child in &mut offspring {
            *child = mutate(child, config.p_mutation, config.tau, m, &mut rng);
        }
        let expanded: Vec<Chromosome> = offspring.iter().flat_map(|c| expand(c, k)).collect();

        let mut combined = population;
        combined.extend(evaluator.evaluate(expanded)?);
        debug_assert_eq!(combined.len(), (2 * k + 1) * n);

        let merged = fast_nondominated_sort(&objectives_of(&combined));
        let survivors = select_survivors(&merged, n);
        // Survivors keep the rank and crowding they had in the merged pool.
        rank = survivors.iter().map(|&i| merged.rank[i]).collect();
        crowding = survivors.iter().map(|&i| merged.crowding[i]).collect();
        let mut slots: Vec<Option<Candidate<T>>> = combined.into_iter().map(Some).collect();
        population = survivors
            .iter()
            .map(|&i| slots[i].take().expect("survivor indices are distinct"))
            .collect();

        if log::log_enabled!(log::Level::Debug) {
            let best_f1 = population
                .iter()
                .map(|c| c.objectives.f1)
                .fold(T::infinity(), T::min);
            debug!(
                "generation {}: front0 = {}, best f1 = {best_f1}",
                generation + 1,
                merged.fronts.first().map_or(0, Vec::len)
            );
        }
    }

    let final_partition = fast_nondominated_sort(&objectives_of(&population));
    let front = final_partition.fronts.first().cloned().unwrap_or_default();
    let (mut candidates, unflipped): (Vec<_>, Vec<_>) = front
        .into_iter()
        .map(|i| population[i].clone())
        .partition(|c| c.objectives.is_valid());
    candidates.sort_by(|a, b| {
        (a.objectives.f1, a.objectives.f2)
            .partial_cmp(&(b.objectives.f1, b.objectives.f2))
            .expect("finite objectives")
    });

    Ok(ExplainResult {
        target_label: refs.target_label(),
        target_probs: refs.target_probs.clone(),
        references: refs
            .members
            .iter()
            .map(|r| ReferenceInfo {
                pool_index: r.pool_index,
                distance: r.distance,
            })
            .collect(),
        degenerate_references: refs.is_degenerate(),
        candidates,
        dropped_unflipped: unflipped.len(),
        evaluations: evaluator.evaluations,
    })
}
