use tscf_core::metrics::sparsity;
use tscf_core::{
    generate_cbf, run_explain, Classifier, Dataset, ExplainError, KnnSoftmax, RunConfig, TimeSeries,
};

fn small_config(seed: u64) -> RunConfig {
    RunConfig {
        pop_size: 20,
        generations: 8,
        seed,
        ..RunConfig::default()
    }
}

fn cbf_setup() -> (Dataset<f64>, Dataset<f64>, KnnSoftmax<f64>) {
    let train = generate_cbf::<f64>(10, 128, 1).unwrap();
    let test = generate_cbf::<f64>(2, 128, 2).unwrap();
    let knn = KnnSoftmax::fit(&train, 1, 1.0).unwrap();
    (train, test, knn)
}

#[test]
fn tiny_run_is_reproducible() {
    let series = vec![
        TimeSeries::new(vec![0.0, 0.0, 0.0, 0.0]).unwrap(),
        TimeSeries::new(vec![1.0, 1.0, 1.0, 1.0]).unwrap(),
        TimeSeries::new(vec![0.1, 0.0, 0.2, 0.0]).unwrap(),
        TimeSeries::new(vec![0.9, 1.2, 1.0, 1.1]).unwrap(),
    ];
    let pool = Dataset::new(series, vec![0, 1, 0, 1], 2).unwrap();
    let knn = KnnSoftmax::fit(&pool, 1, 1.0).unwrap();
    let target = TimeSeries::new(vec![0.05, 0.1, 0.0, 0.1]).unwrap();
    let config = RunConfig {
        pop_size: 2,
        generations: 1,
        seed: 9,
        ..RunConfig::default()
    };
    let a = run_explain(&target, &knn, &pool, &config).unwrap();
    let b = run_explain(&target, &knn, &pool, &config).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    assert!(a.degenerate_references);
    assert_eq!(a.references.len(), 2);
}

#[test]
fn fronts_are_valid_non_dominated_and_local() {
    let (train, test, knn) = cbf_setup();
    for (i, target) in test.series().iter().enumerate() {
        let result = run_explain(target, &knn, &train, &small_config(i as u64)).unwrap();
        let label = knn.predict_one(target).unwrap().argmax();
        assert!(!result.candidates.is_empty());
        assert!(result.candidates.len() <= 20);
        for (j, a) in result.candidates.iter().enumerate() {
            assert!(a.objectives.is_valid());
            assert_ne!(knn.predict_one(&a.series).unwrap().argmax(), label);
            let bound = a.chrom.len() as f64 / 128.0;
            assert!(sparsity(target, &a.series) <= bound);
            for b in &result.candidates[j + 1..] {
                assert!(!a.objectives.dominates(&b.objectives));
                assert!(!b.objectives.dominates(&a.objectives));
            }
        }
        let keys: Vec<(f64, f64)> = result
            .candidates
            .iter()
            .map(|c| (c.objectives.f1, c.objectives.f2))
            .collect();
        assert!(keys.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn cache_does_not_change_results() {
    let (train, test, knn) = cbf_setup();
    let target = &test.series()[1];
    let plain = run_explain(target, &knn, &train, &small_config(3)).unwrap();
    let cached = run_explain(
        target,
        &knn,
        &train,
        &RunConfig {
            cache_candidates: true,
            ..small_config(3)
        },
    )
    .unwrap();
    assert_eq!(plain.candidates, cached.candidates);
    assert!(cached.evaluations <= plain.evaluations);
    // (2K + 1) N per generation minus the parents, plus P0
    assert_eq!(plain.evaluations, 20 + 8 * 2 * 4 * 20);
}

#[test]
fn seeds_change_the_search() {
    let (train, test, knn) = cbf_setup();
    let target = &test.series()[0];
    let a = run_explain(target, &knn, &train, &small_config(1)).unwrap();
    let b = run_explain(target, &knn, &train, &small_config(2)).unwrap();
    assert_ne!(a.candidates, b.candidates);
}

#[test]
fn single_precision_run() {
    let train = generate_cbf::<f32>(5, 64, 1).unwrap();
    let test = generate_cbf::<f32>(1, 64, 2).unwrap();
    let knn = KnnSoftmax::fit(&train, 1, 1.0).unwrap();
    let result = run_explain(&test.series()[0], &knn, &train, &small_config(0)).unwrap();
    assert!(result.candidates.iter().all(|c| c.objectives.f1 < 1.01));
}

struct AlwaysFirst;

impl Classifier<f64> for AlwaysFirst {
    fn n_classes(&self) -> usize {
        2
    }
    fn series_len(&self) -> usize {
        128
    }
    fn predict_proba(
        &self,
        batch: &[TimeSeries<f64>],
    ) -> Result<Vec<tscf_core::ProbVector<f64>>, tscf_core::ClassifierError> {
        Ok(batch
            .iter()
            .map(|_| tscf_core::ProbVector::new(vec![0.9, 0.1]).unwrap())
            .collect())
    }
}

#[test]
fn errors() {
    let (train, test, knn) = cbf_setup();
    let target = &test.series()[0];
    assert!(matches!(
        run_explain(target, &AlwaysFirst, &train, &small_config(0)),
        Err(ExplainError::NoReferences { label: 0 })
    ));
    let odd = RunConfig {
        pop_size: 7,
        ..small_config(0)
    };
    assert!(matches!(
        run_explain(target, &knn, &train, &odd),
        Err(ExplainError::Config(_))
    ));
    let short = TimeSeries::new(vec![0.0; 64]).unwrap();
    assert!(matches!(
        run_explain(&short, &knn, &train, &small_config(0)),
        Err(ExplainError::LengthMismatch { .. })
    ));
}

#[test]
fn config_json_defaults_and_aliases() {
    let c: RunConfig = serde_json::from_str("{}").unwrap();
    assert_eq!(c, RunConfig::default());
    assert_eq!(
        (c.pop_size, c.generations, c.n_references, c.tau),
        (50, 50, 4, Some(0.4))
    );
    let c: RunConfig = serde_json::from_str(r#"{"k": 2, "tau": null}"#).unwrap();
    assert_eq!((c.n_references, c.tau), (2, None));
    assert!(serde_json::from_str::<RunConfig>(r#"{"population": 10}"#).is_err());
}
