//! Explains CBF test series with the built-in classifier and prints metric means.
//!
//! Usage: `cargo run --release --example desk_run [n_targets]`

use std::time::Instant;

use tscf_core::{
    evaluate_run, generate_cbf, run_explain, Dataset64, ExplainedTarget, KnnSoftmax, RunConfig,
};

fn main() {
    let n_targets: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(50);
    let train: Dataset64 = generate_cbf(10, 128, 1).expect("train");
    let test: Dataset64 = generate_cbf(n_targets.div_ceil(3), 128, 2).expect("test");
    let clf = KnnSoftmax::fit(&train, 1, 1.0).expect("fit");
    let started = Instant::now();
    let mut cases = Vec::new();
    for (i, target) in test.series().iter().take(n_targets).enumerate() {
        let config = RunConfig {
            seed: i as u64,
            ..RunConfig::default()
        };
        let result = run_explain(target, &clf, &train, &config).expect("explain");
        cases.push(ExplainedTarget {
            target_id: i,
            target: target.clone(),
            candidates: result.candidates.into_iter().map(|c| c.series).collect(),
        });
    }
    let report = evaluate_run(&cases, &clf).expect("evaluate");
    println!("{:#?}", report.summary);
    println!("elapsed: {:.1?}", started.elapsed());
}
