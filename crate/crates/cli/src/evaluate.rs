use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use log::warn;
use serde::Serialize;
use tscf_core::metrics::{Summary, TargetDiversity};
use tscf_core::{evaluate_run, Dataset64, ExplainedTarget, TimeSeries64};

use crate::args::EvaluateArgs;
use crate::classifier_spec::ClassifierSpec;
use crate::error::{data, CliError, Result};
use crate::files::{create_dir, read_dataset, write_atomic, write_json};
use crate::records::{
    instance_file_name, InstanceRecord, RunManifest, Status, INSTANCES_DIR, MANIFEST_FILE,
};
use crate::GlobalOpts;

#[derive(Debug, Serialize)]
struct EvaluationSummary {
    source: String,
    classifier: String,
    failed_instances: Vec<usize>,
    summary: Summary,
    per_target: Vec<TargetDiversity>,
}

struct Inputs {
    source: PathBuf,
    spec: ClassifierSpec,
    train: Option<Dataset64>,
    test: Dataset64,
    cases: Vec<(usize, Vec<Vec<f64>>)>,
    failed: Vec<usize>,
    default_output: Option<PathBuf>,
}

pub fn run(global: &GlobalOpts, args: &EvaluateArgs) -> Result<()> {
    let inputs = match (&args.run, &args.counterfactuals) {
        (Some(dir), None) => from_run(dir)?,
        (None, Some(file)) => from_file(file, args)?,
        _ => {
            return Err(CliError::Usage(
                "evaluate requires exactly one of --run or --counterfactuals".into(),
            ))
        }
    };
    let out = global
        .output
        .clone()
        .or(inputs.default_output.clone())
        .ok_or_else(|| CliError::Usage("evaluate --counterfactuals requires -o/--output".into()))?;

    let classifier = inputs
        .spec
        .build(inputs.train.as_ref().unwrap_or(&inputs.test))?;
    let m = inputs.test.series_len();
    let mut cases = Vec::with_capacity(inputs.cases.len());
    let mut offenders = Vec::new();
    for (target_id, candidates) in inputs.cases {
        let target = inputs
            .test
            .series()
            .get(target_id)
            .ok_or_else(|| {
                CliError::Data(format!(
                    "target {target_id} out of range: test set has {} series",
                    inputs.test.len()
                ))
            })?
            .clone();
        let mut series = Vec::with_capacity(candidates.len());
        for (j, values) in candidates.into_iter().enumerate() {
            if values.len() != m {
                offenders.push(format!(
                    "target {target_id} candidate {j}: length {} (expected {m})",
                    values.len()
                ));
                continue;
            }
            match TimeSeries64::new(values) {
                Ok(s) => series.push(s),
                Err(e) => offenders.push(format!("target {target_id} candidate {j}: {e}")),
            }
        }
        cases.push(ExplainedTarget {
            target_id,
            target,
            candidates: series,
        });
    }
    if !offenders.is_empty() {
        return Err(CliError::Data(format!(
            "{}: invalid counterfactuals:\n  {}",
            inputs.source.display(),
            offenders.join("\n  ")
        )));
    }

    let report = evaluate_run(&cases, classifier.as_ref()).map_err(data("evaluate"))?;
    create_dir(&out)?;
    write_atomic(&out.join("metrics.csv"), report.to_csv().as_bytes())?;
    let summary = EvaluationSummary {
        source: inputs.source.display().to_string(),
        classifier: inputs.spec.to_string(),
        failed_instances: inputs.failed,
        summary: report.summary.clone(),
        per_target: report.diversity.clone(),
    };
    write_json(&out.join("metrics_summary.json"), &summary)?;

    let mean = |s: Option<tscf_core::metrics::Stat>| s.map_or(f64::NAN, |s| s.mean);
    println!(
        "{} targets, {} pairs: validity {:.4}, sparsity {:.4}, l1 {:.4}, l2 {:.4}, diversity {:.2}",
        report.summary.n_targets,
        report.summary.n_pairs,
        mean(report.summary.validity),
        mean(report.summary.sparsity),
        mean(report.summary.l1_proximity),
        mean(report.summary.l2_proximity),
        mean(report.summary.diversity),
    );
    Ok(())
}

fn from_run(dir: &Path) -> Result<Inputs> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(data(path.display()))?;
    let manifest: RunManifest = serde_json::from_str(&text).map_err(data(path.display()))?;
    let train = read_dataset(&manifest.train, manifest.znorm)?;
    let test = read_dataset(&manifest.test, manifest.znorm)?;

    let mut cases = Vec::new();
    let mut failed = Vec::new();
    let mut offenders = Vec::new();
    for &id in &manifest.instances {
        let file = dir.join(INSTANCES_DIR).join(instance_file_name(id));
        let record = fs::read_to_string(&file)
            .map_err(|e| e.to_string())
            .and_then(|t| serde_json::from_str::<InstanceRecord>(&t).map_err(|e| e.to_string()))
            .and_then(|r| {
                if r.target_id == id {
                    Ok(r)
                } else {
                    Err(format!("holds target {}", r.target_id))
                }
            });
        match record {
            Ok(r) if r.status == Status::Failed => {
                warn!("instance {id} failed during explain; skipped");
                failed.push(id);
            }
            Ok(r) => cases.push((id, r.candidates.into_iter().map(|c| c.series).collect())),
            Err(e) => offenders.push(format!("{}: {e}", file.display())),
        }
    }
    if !offenders.is_empty() {
        return Err(CliError::Data(format!(
            "unreadable instance files:\n  {}",
            offenders.join("\n  ")
        )));
    }
    Ok(Inputs {
        source: dir.to_path_buf(),
        spec: manifest.classifier.parse()?,
        train: Some(train),
        test,
        cases,
        failed,
        default_output: Some(dir.to_path_buf()),
    })
}

/// One counterfactual per line: the test index, then the values, separated
/// by tabs or commas. Blank lines are skipped.
fn from_file(file: &Path, args: &EvaluateArgs) -> Result<Inputs> {
    let test_path = args.test.as_ref().expect("clap enforces --test");
    let test = read_dataset(test_path, args.znorm)?;
    let spec: ClassifierSpec = args.classifier.parse()?;
    let train = match (&args.train, &spec) {
        (Some(p), _) => Some(read_dataset(p, args.znorm)?),
        (None, ClassifierSpec::Knn { .. }) => {
            return Err(CliError::Usage("a knn classifier requires --train".into()))
        }
        (None, ClassifierSpec::External(_)) => None,
    };

    let text = fs::read_to_string(file).map_err(data(file.display()))?;
    let mut grouped: BTreeMap<usize, Vec<Vec<f64>>> = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad = |what: String| CliError::Data(format!("{}:{}: {what}", file.display(), n + 1));
        let mut fields = line.split(['\t', ',']).map(str::trim);
        let head = fields.next().unwrap_or_default();
        let id = head
            .parse::<usize>()
            .or_else(|_| {
                head.parse::<f64>()
                    .ok()
                    .filter(|v| v.fract() == 0.0 && *v >= 0.0)
                    .map(|v| v as usize)
                    .ok_or(())
            })
            .map_err(|_| bad(format!("{head:?} is not a test index")))?;
        let values = fields
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| bad(format!("{t:?} is not a number")))
            })
            .collect::<Result<Vec<_>>>()?;
        grouped.entry(id).or_default().push(values);
    }
    Ok(Inputs {
        source: file.to_path_buf(),
        spec,
        train,
        test,
        cases: grouped.into_iter().collect(),
        failed: Vec::new(),
        default_output: None,
    })
}
