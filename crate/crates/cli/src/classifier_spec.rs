use std::fmt;
use std::str::FromStr;

use tscf_core::{Classifier, Dataset64, ExternalClassifier, KnnSoftmax};

use crate::error::{CliError, Result};

/// `knn[:k=<n>,temp=<t>]` or `ext:<command line>`.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierSpec {
    Knn { k: usize, temperature: f64 },
    External(String),
}

impl Default for ClassifierSpec {
    fn default() -> Self {
        ClassifierSpec::Knn {
            k: 1,
            temperature: 1.0,
        }
    }
}

impl FromStr for ClassifierSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| CliError::Usage(format!("classifier spec {s:?}: {why}"));
        if let Some(cmd) = s.strip_prefix("ext:") {
            if cmd.trim().is_empty() {
                return Err(bad("empty command"));
            }
            return Ok(ClassifierSpec::External(cmd.to_string()));
        }
        let params = match s {
            "knn" => "",
            _ => s
                .strip_prefix("knn:")
                .ok_or_else(|| bad("expected knn:... or ext:..."))?,
        };
        let (mut k, mut temperature) = (1usize, 1.0f64);
        for kv in params.split(',').filter(|p| !p.is_empty()) {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| bad("expected key=value"))?;
            match key.trim() {
                "k" => {
                    k = value
                        .trim()
                        .parse()
                        .map_err(|_| bad("k must be an integer"))?
                }
                "temp" | "temperature" => {
                    temperature = value
                        .trim()
                        .parse()
                        .map_err(|_| bad("temp must be a number"))?
                }
                other => return Err(bad(&format!("unknown parameter {other:?}"))),
            }
        }
        Ok(ClassifierSpec::Knn { k, temperature })
    }
}

impl fmt::Display for ClassifierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifierSpec::Knn { k, temperature } => write!(f, "knn:k={k},temp={temperature:?}"),
            ClassifierSpec::External(cmd) => write!(f, "ext:{cmd}"),
        }
    }
}

impl ClassifierSpec {
    /// Fits (knn) or starts (ext) the classifier for data shaped like `train`.
    pub fn build(&self, train: &Dataset64) -> Result<Box<dyn Classifier<f64>>> {
        match self {
            ClassifierSpec::Knn { k, temperature } => KnnSoftmax::fit(train, *k, *temperature)
                .map(|c| Box::new(c) as Box<dyn Classifier<f64>>)
                .map_err(|e| CliError::Usage(format!("classifier: {e}"))),
            ClassifierSpec::External(cmd) => {
                ExternalClassifier::from_shell(cmd, train.n_classes(), train.series_len())
                    .map(|c| Box::new(c) as Box<dyn Classifier<f64>>)
                    .map_err(|e| CliError::Data(format!("classifier: {e}")))
            }
        }
    }
}
