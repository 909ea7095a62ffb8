//! Line-delimited JSON messages exchanged with an external classifier.

use serde::{Deserialize, Serialize};

/// One batch of series to classify.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub id: u64,
    pub series: Vec<Vec<f64>>,
}

/// Class probabilities for a request, one row per series, same `id`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Response {
    pub id: u64,
    pub probs: Vec<Vec<f64>>,
}
