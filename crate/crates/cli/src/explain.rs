use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::Deserialize;
use tscf_core::{run_explain, Classifier, Dataset64, RunConfig};

use crate::args::ExplainArgs;
use crate::classifier_spec::ClassifierSpec;
use crate::error::{data, CliError, Result};
use crate::files::{create_dir, read_dataset, sha256_hex, write_atomic, write_json};
use crate::records::{
    instance_file_name, InstanceRecord, RunManifest, Status, INSTANCES_DIR, MANIFEST_FILE,
};
use crate::GlobalOpts;

/// Contents of a `--config` file. Every field is optional; `tau = 0`
/// disables length steering.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    pub train: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub classifier: Option<String>,
    pub instances: Option<String>,
    pub znorm: Option<bool>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub pop_size: Option<usize>,
    pub generations: Option<usize>,
    pub p_crossover: Option<f64>,
    pub p_mutation: Option<f64>,
    #[serde(alias = "k", alias = "references")]
    pub n_references: Option<usize>,
    pub tau: Option<f64>,
    pub ar_order: Option<usize>,
    #[serde(alias = "cache")]
    pub cache_candidates: Option<bool>,
}

impl CliConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(data(path.display()))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

/// Fully resolved inputs of a run.
#[derive(Debug, Clone)]
pub struct Plan {
    pub train: PathBuf,
    pub test: PathBuf,
    pub classifier: ClassifierSpec,
    pub instances: Option<Vec<usize>>,
    pub znorm: bool,
    pub config: RunConfig,
    pub jobs: Option<usize>,
    pub output: PathBuf,
}

fn tau_from(v: f64) -> Option<f64> {
    (v != 0.0).then_some(v)
}

/// Layers defaults, then the manifest or config file, then flags.
pub fn resolve(global: &GlobalOpts, args: &ExplainArgs) -> Result<Plan> {
    let output = global
        .output
        .clone()
        .ok_or_else(|| CliError::Usage("explain requires -o/--output".into()))?;
    let mut config = RunConfig::default();
    let mut train = None;
    let mut test = None;
    let mut classifier = None;
    let mut instances = None;
    let mut znorm = false;
    let mut jobs = None;

    if let Some(path) = &args.manifest {
        let text = fs::read_to_string(path).map_err(data(path.display()))?;
        let m: RunManifest = serde_json::from_str(&text).map_err(data(path.display()))?;
        for (file, expected) in [(&m.train, &m.train_sha256), (&m.test, &m.test_sha256)] {
            let found = sha256_hex(file)?;
            if &found != expected {
                warn!("{} changed since the manifest was written", file.display());
            }
        }
        train = Some(m.train);
        test = Some(m.test);
        classifier = Some(m.classifier);
        instances = Some(m.instances);
        znorm = m.znorm;
        config = m.config;
        config.seed = m.master_seed;
    }

    let mut selection = None;
    if let Some(path) = &global.config {
        let c = CliConfig::load(path)?;
        train = c.train.or(train);
        test = c.test.or(test);
        classifier = c.classifier.or(classifier);
        selection = c.instances;
        znorm = c.znorm.unwrap_or(znorm);
        jobs = c.jobs;
        config.seed = c.seed.unwrap_or(config.seed);
        config.pop_size = c.pop_size.unwrap_or(config.pop_size);
        config.generations = c.generations.unwrap_or(config.generations);
        config.p_crossover = c.p_crossover.unwrap_or(config.p_crossover);
        config.p_mutation = c.p_mutation.unwrap_or(config.p_mutation);
        config.n_references = c.n_references.unwrap_or(config.n_references);
        config.tau = c.tau.map_or(config.tau, tau_from);
        config.ar_order = c.ar_order.unwrap_or(config.ar_order);
        config.cache_candidates = c.cache_candidates.unwrap_or(config.cache_candidates);
    }

    train = args.train.clone().or(train);
    test = args.test.clone().or(test);
    classifier = args.classifier.clone().or(classifier);
    selection = args.instances.clone().or(selection);
    znorm |= args.znorm;
    jobs = global.jobs.or(jobs);
    config.seed = global.seed.unwrap_or(config.seed);
    config.pop_size = args.pop_size.unwrap_or(config.pop_size);
    config.generations = args.generations.unwrap_or(config.generations);
    config.p_crossover = args.p_crossover.unwrap_or(config.p_crossover);
    config.p_mutation = args.p_mutation.unwrap_or(config.p_mutation);
    config.n_references = args.references.unwrap_or(config.n_references);
    config.tau = args.tau.map_or(config.tau, tau_from);
    config.ar_order = args.ar_order.unwrap_or(config.ar_order);
    config.cache_candidates |= args.cache;

    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(s) = selection {
        instances = parse_instances(&s)?;
    }
    if jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be >= 1".into()));
    }
    let missing = |what: &str| CliError::Usage(format!("explain requires --{what}"));
    Ok(Plan {
        train: train.ok_or_else(|| missing("train"))?,
        test: test.ok_or_else(|| missing("test"))?,
        classifier: classifier
            .as_deref()
            .unwrap_or("knn:k=1,temp=1.0")
            .parse()?,
        instances,
        znorm,
        config,
        jobs,
        output,
    })
}

/// `all` or comma-separated indices; `None` means every test series.
pub fn parse_instances(s: &str) -> Result<Option<Vec<usize>>> {
    if s.trim() == "all" {
        return Ok(None);
    }
    let ids = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("--instances: {t:?} is not an index")))
        })
        .collect::<Result<Vec<_>>>()?;
    if ids.is_empty() {
        return Err(CliError::Usage("--instances is empty".into()));
    }
    Ok(Some(ids))
}

/// SplitMix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of test instance `index` under `master`.
pub fn instance_seed(master: u64, index: usize) -> u64 {
    mix(master ^ mix(index as u64))
}

pub fn run(global: &GlobalOpts, args: &ExplainArgs) -> Result<()> {
    let plan = resolve(global, args)?;
    let train = read_dataset(&plan.train, plan.znorm)?;
    let test = read_dataset(&plan.test, plan.znorm)?;
    if train.series_len() != test.series_len() {
        return Err(CliError::Data(format!(
            "train series have length {}, test series {}",
            train.series_len(),
            test.series_len()
        )));
    }
    let ids = match &plan.instances {
        None => (0..test.len()).collect(),
        Some(ids) => ids.clone(),
    };
    if let Some(&bad) = ids.iter().find(|&&i| i >= test.len()) {
        return Err(CliError::Usage(format!(
            "instance {bad} out of range: test set has {} series",
            test.len()
        )));
    }
    let classifier = plan.classifier.build(&train)?;

    create_dir(&plan.output.join(INSTANCES_DIR))?;
    let manifest = RunManifest {
        engine_version: env!("CARGO_PKG_VERSION").to_string(),
        created: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        train_sha256: sha256_hex(&plan.train)?,
        train: plan.train.clone(),
        test_sha256: sha256_hex(&plan.test)?,
        test: plan.test.clone(),
        znorm: plan.znorm,
        classifier: plan.classifier.to_string(),
        instances: ids.clone(),
        master_seed: plan.config.seed,
        config: plan.config.clone(),
    };
    write_json(&plan.output.join(MANIFEST_FILE), &manifest)?;

    let explain_all = || {
        ids.par_iter()
            .map(|&id| explain_one(id, &test, &train, classifier.as_ref(), &plan))
            .collect::<Result<Vec<_>>>()
    };
    let records = match plan.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?
            .install(explain_all)?,
        None => explain_all()?,
    };

    write_atomic(
        &plan.output.join("fronts.csv"),
        fronts_csv(&records).as_bytes(),
    )?;
    write_atomic(
        &plan.output.join("instances.csv"),
        instances_csv(&records).as_bytes(),
    )?;

    let failed = records
        .iter()
        .filter(|r| r.status == Status::Failed)
        .count();
    let n_candidates: usize = records.iter().map(|r| r.candidates.len()).sum();
    println!(
        "explained {} of {} instances, {} candidates, output in {}",
        records.len() - failed,
        records.len(),
        n_candidates,
        plan.output.display()
    );
    if failed == records.len() {
        return Err(CliError::AllFailed(failed));
    }
    Ok(())
}

fn explain_one(
    id: usize,
    test: &Dataset64,
    train: &Dataset64,
    classifier: &dyn Classifier<f64>,
    plan: &Plan,
) -> Result<InstanceRecord> {
    let seed = instance_seed(plan.config.seed, id);
    let config = RunConfig {
        seed,
        ..plan.config.clone()
    };
    let record = match run_explain(&test.series()[id], classifier, train, &config) {
        Ok(result) => {
            info!(
                "instance {id}: {} candidates, {} evaluations",
                result.candidates.len(),
                result.evaluations
            );
            InstanceRecord::ok(id, seed, result)
        }
        Err(e) => {
            warn!("instance {id} failed: {e}");
            InstanceRecord::failed(id, seed, e.to_string())
        }
    };
    let path = plan.output.join(INSTANCES_DIR).join(instance_file_name(id));
    write_json(&path, &record)?;
    Ok(record)
}

fn fronts_csv(records: &[InstanceRecord]) -> String {
    let mut out = String::from("target_id,candidate_id,f1,f2,soi_start,soi_end,ref_idx\n");
    for r in records {
        for c in &r.candidates {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.target_id, c.candidate_id, c.f1, c.f2, c.soi_start, c.soi_end, c.ref_idx
            );
        }
    }
    out
}

fn instances_csv(records: &[InstanceRecord]) -> String {
    let mut out = String::from("target_id,status,n_candidates,error\n");
    for r in records {
        let status = match r.status {
            Status::Ok => "ok",
            Status::Failed => "failed",
        };
        let error = r.error.as_deref().unwrap_or("").replace(['"', '\n'], " ");
        let _ = writeln!(
            out,
            "{},{status},{},\"{error}\"",
            r.target_id,
            r.candidates.len()
        );
    }
    out
}
