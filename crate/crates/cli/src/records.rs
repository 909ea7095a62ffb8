use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use tscf_core::{ExplainResult, RunConfig};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const INSTANCES_DIR: &str = "instances";

pub fn instance_file_name(target_id: usize) -> String {
    format!("target_{target_id:05}.json")
}

/// Everything needed to repeat an `explain` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub engine_version: String,
    pub created: String,
    pub train: PathBuf,
    pub train_sha256: String,
    pub test: PathBuf,
    pub test_sha256: String,
    pub znorm: bool,
    pub classifier: String,
    pub instances: Vec<usize>,
    pub master_seed: u64,
    /// `seed` holds the master seed; each instance derives its own.
    pub config: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceRecord {
    pub pool_index: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateRecord {
    pub candidate_id: usize,
    pub soi_start: usize,
    pub soi_end: usize,
    pub ref_idx: usize,
    pub f1: f64,
    pub f2: f64,
    pub series: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceRecord {
    pub target_id: usize,
    pub seed: u64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_label: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_probs: Option<Vec<f64>>,
    #[serde(default)]
    pub references: Vec<ReferenceRecord>,
    #[serde(default)]
    pub degenerate_references: bool,
    #[serde(default)]
    pub dropped_unflipped: usize,
    #[serde(default)]
    pub evaluations: usize,
    #[serde(default)]
    pub candidates: Vec<CandidateRecord>,
}

impl InstanceRecord {
    pub fn ok(target_id: usize, seed: u64, result: ExplainResult<f64>) -> Self {
        Self {
            target_id,
            seed,
            status: Status::Ok,
            error: None,
            target_label: Some(result.target_label),
            target_probs: Some(result.target_probs.probs().to_vec()),
            references: result
                .references
                .iter()
                .map(|r| ReferenceRecord {
                    pool_index: r.pool_index,
                    distance: r.distance,
                })
                .collect(),
            degenerate_references: result.degenerate_references,
            dropped_unflipped: result.dropped_unflipped,
            evaluations: result.evaluations,
            candidates: result
                .candidates
                .into_iter()
                .enumerate()
                .map(|(candidate_id, c)| CandidateRecord {
                    candidate_id,
                    soi_start: c.chrom.start,
                    soi_end: c.chrom.end,
                    ref_idx: c.chrom.ref_idx,
                    f1: c.objectives.f1,
                    f2: c.objectives.f2,
                    series: c.series.into_values(),
                })
                .collect(),
        }
    }

    pub fn failed(target_id: usize, seed: u64, error: String) -> Self {
        Self {
            target_id,
            seed,
            status: Status::Failed,
            error: Some(error),
            target_label: None,
            target_probs: None,
            references: Vec::new(),
            degenerate_references: false,
            dropped_unflipped: 0,
            evaluations: 0,
            candidates: Vec::new(),
        }
    }
}
