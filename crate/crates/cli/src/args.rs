use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "tscf",
    version,
    about = "Counterfactual explanations for time-series classifiers"
)]
pub struct Cli {
    /// JSON file with run configuration (overridden by flags).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master random seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(short = 'o', long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic dataset as UCR-format train/test files.
    GenData(GenDataArgs),
    /// Explain test instances and write fronts and candidates.
    Explain(ExplainArgs),
    /// Score counterfactuals from an explain run or an external file.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Generator {
    Cbf,
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    pub generator: Generator,
    /// Number of training series.
    #[arg(long)]
    pub train: usize,
    /// Number of test series.
    #[arg(long)]
    pub test: usize,
    #[arg(long, default_value_t = 128)]
    pub length: usize,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    /// Training set (UCR format); also the reference pool.
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// Test set (UCR format); instances to explain.
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// `knn:k=1,temp=1.0` or `ext:<command line>`.
    #[arg(long)]
    pub classifier: Option<String>,
    /// `all` or a comma-separated list of test indices.
    #[arg(long)]
    pub instances: Option<String>,
    /// Replay the run described by a manifest.
    #[arg(long, conflicts_with_all = ["train", "test", "classifier", "instances"])]
    pub manifest: Option<PathBuf>,
    /// Z-normalize every series after loading.
    #[arg(long)]
    pub znorm: bool,
    #[arg(long)]
    pub pop_size: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub p_crossover: Option<f64>,
    #[arg(long)]
    pub p_mutation: Option<f64>,
    /// Number of references.
    #[arg(long)]
    pub references: Option<usize>,
    /// Tolerable subsequence ratio; 0 disables length steering.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub ar_order: Option<usize>,
    /// Reuse candidates of repeated chromosomes.
    #[arg(long)]
    pub cache: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Output directory of an `explain` run.
    #[arg(long, conflicts_with = "counterfactuals")]
    pub run: Option<PathBuf>,
    /// External counterfactuals: one per line, test index then values.
    #[arg(long, requires = "test")]
    pub counterfactuals: Option<PathBuf>,
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[arg(long, default_value = "knn:k=1,temp=1.0")]
    pub classifier: String,
    #[arg(long)]
    pub znorm: bool,
}
