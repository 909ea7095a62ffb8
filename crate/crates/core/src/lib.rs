//! Sparse, valid counterfactual explanations for univariate time-series
//! classifiers.
//!
//! A counterfactual differs from the explained series only on one
//! contiguous subsequence. The engine searches subsequence locations with a
//! customised NSGA-II, minimising the classifier-space distance to reference
//! samples of other classes together with the amount of change, and fills
//! the subsequence with values produced by an autoregressive model of the
//! reference-minus-target difference.
//!
//! All numeric code is generic over [`Scalar`] (`f32`, `f64`); the aliases
//! below fix the scalar for everyday use.

pub mod classifier;
pub mod evolution;
pub mod metrics;
pub mod objectives;
pub mod reference;
pub mod scalar;
pub mod soigen;
pub mod timeseries;
pub mod wire;

pub use classifier::{Classifier, ClassifierError, ExternalClassifier, KnnSoftmax, ProbVector};
pub use evolution::{run_explain, Candidate, Chromosome, ExplainError, ExplainResult, RunConfig};
pub use metrics::{evaluate_run, ExplainedTarget, MetricReport};
pub use objectives::ObjectivePair;
pub use reference::{js_distance, select_references, ReferenceSet};
pub use scalar::Scalar;
pub use timeseries::{generate_cbf, generate_cbf_total, parse_ucr, DataError, Dataset, TimeSeries};

pub type TimeSeries64 = TimeSeries<f64>;
pub type Dataset64 = Dataset<f64>;
pub type ProbVector64 = ProbVector<f64>;
pub type KnnSoftmax64 = KnnSoftmax<f64>;
pub type Candidate64 = Candidate<f64>;
pub type ExplainResult64 = ExplainResult<f64>;

pub type TimeSeries32 = TimeSeries<f32>;
pub type Dataset32 = Dataset<f32>;
pub type ProbVector32 = ProbVector<f32>;
pub type KnnSoftmax32 = KnnSoftmax<f32>;
pub type Candidate32 = Candidate<f32>;
pub type ExplainResult32 = ExplainResult<f32>;
