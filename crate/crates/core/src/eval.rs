//! Holdout and cross-validation evaluation of a classifier specification.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::classify::{ClassifierSpec, ClassifyError, Prediction, Registry};
use crate::data::MimlDataset;
use crate::metrics::{self, Measure, MeasureValue, MetricsError};
use crate::par::{self, Execution};
use crate::partition::{materialize_folds, partition, PartitionError, Strategy};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("train and test datasets do not share attributes and labels")]
    Incompatible,
    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<EvalError>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvaluatorKind {
    Holdout,
    CrossValidation,
}

impl EvaluatorKind {
    pub fn key(self) -> &'static str {
        match self {
            EvaluatorKind::Holdout => "evaluation.EvaluatorHoldout",
            EvaluatorKind::CrossValidation => "evaluation.EvaluatorCV",
        }
    }
}

impl fmt::Display for EvaluatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for EvaluatorKind {
    type Err = String;

    /// Accepts the key with or without a `miml.` prefix, or the bare class name.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bare = s.strip_prefix("miml.").unwrap_or(s);
        let bare = bare.strip_prefix("evaluation.").unwrap_or(bare);
        match bare {
            "EvaluatorHoldout" => Ok(EvaluatorKind::Holdout),
            "EvaluatorCV" => Ok(EvaluatorKind::CrossValidation),
            _ => Err(format!("unknown evaluator '{s}'")),
        }
    }
}

/// Outcome of one train/test run.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub fold: usize,
    pub num_train: usize,
    pub num_test: usize,
    pub train_time: Duration,
    pub test_time: Duration,
    pub values: Vec<MeasureValue>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationResult {
    pub dataset: String,
    pub algorithm: String,
    pub evaluator: EvaluatorKind,
    pub label_names: Vec<String>,
    pub measures: Vec<Measure>,
    pub per_label: bool,
    /// One entry for holdout, `k` for cross-validation, in fold order.
    pub folds: Vec<FoldResult>,
    /// Cross-validation only: per-measure mean over folds.
    pub mean: Option<Vec<MeasureValue>>,
    /// Cross-validation only: per-measure sample (n − 1) standard deviation.
    pub std: Option<Vec<MeasureValue>>,
}

/// Evaluation settings shared by holdout and cross-validation.
#[derive(Debug, Clone)]
pub struct Evaluator {
    /// Empty means every measure.
    pub measures: Vec<Measure>,
    pub per_label: bool,
    pub exec: Execution,
    pub registry: Registry,
}

impl Default for Evaluator {
    fn default() -> Self {
        Self::new(Vec::new(), false)
    }
}

impl Evaluator {
    pub fn new(measures: Vec<Measure>, per_label: bool) -> Self {
        Self {
            measures,
            per_label,
            exec: Execution::default(),
            registry: Registry::builtin(),
        }
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    fn measures(&self) -> Vec<Measure> {
        if self.measures.is_empty() {
            Measure::ALL.to_vec()
        } else {
            self.measures.clone()
        }
    }

    fn result(&self, spec: &ClassifierSpec, ds: &MimlDataset, evaluator: EvaluatorKind) -> EvaluationResult {
        EvaluationResult {
            dataset: ds.relation().to_string(),
            algorithm: self.registry.resolve(&spec.key).unwrap_or(&spec.key).to_string(),
            evaluator,
            label_names: ds.labels().names().to_vec(),
            measures: self.measures(),
            per_label: self.per_label,
            folds: Vec::new(),
            mean: None,
            std: None,
        }
    }

    fn run(
        &self,
        spec: &ClassifierSpec,
        train: &MimlDataset,
        test: &MimlDataset,
        fold: usize,
    ) -> Result<FoldResult, EvalError> {
        if !train.is_compatible(test) {
            return Err(EvalError::Incompatible);
        }
        let learner = self.registry.build(spec)?;
        let start = Instant::now();
        let model = learner.fit(train, self.exec)?;
        let train_time = start.elapsed();
        let start = Instant::now();
        let preds: Vec<Prediction> =
            par::try_map_indexed(self.exec, test.num_bags(), |i| model.predict(&test.bags()[i]))?;
        let test_time = start.elapsed();
        let values = metrics::evaluate(test.labels(), &preds, &self.measures(), self.per_label)?;
        Ok(FoldResult {
            fold,
            num_train: train.num_bags(),
            num_test: test.num_bags(),
            train_time,
            test_time,
            values,
        })
    }

    /// Trains on `train` once and evaluates on `test`.
    pub fn holdout(
        &self,
        spec: &ClassifierSpec,
        train: &MimlDataset,
        test: &MimlDataset,
    ) -> Result<EvaluationResult, EvalError> {
        let mut result = self.result(spec, train, EvaluatorKind::Holdout);
        result.folds.push(self.run(spec, train, test, 0)?);
        Ok(result)
    }

    /// `k`-fold cross-validation. Folds may run concurrently; results are
    /// identical to a sequential run.
    pub fn cross_validate(
        &self,
        spec: &ClassifierSpec,
        ds: &MimlDataset,
        k: usize,
        seed: u64,
        strategy: Strategy,
    ) -> Result<EvaluationResult, EvalError> {
        // Fail on a bad specification once, not once per fold.
        self.registry.build(spec)?;
        let fa = partition(ds, strategy, k, seed)?;
        let folds = par::try_map_indexed(self.exec, k, |fold| {
            let annotate = |e: EvalError| EvalError::Fold {
                fold,
                source: Box::new(e),
            };
            let (train, test) = materialize_folds(ds, &fa, fold).map_err(|e| annotate(e.into()))?;
            self.run(spec, &train, &test, fold).map_err(annotate)
        })?;
        let mut result = self.result(spec, ds, EvaluatorKind::CrossValidation);
        let (mean, std) = summarize(&folds);
        result.folds = folds;
        result.mean = Some(mean);
        result.std = Some(std);
        Ok(result)
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

/// Component-wise mean and sample standard deviation over folds.
fn summarize(folds: &[FoldResult]) -> (Vec<MeasureValue>, Vec<MeasureValue>) {
    let first = &folds[0].values;
    let mut means = Vec::with_capacity(first.len());
    let mut stds = Vec::with_capacity(first.len());
    for (i, v) in first.iter().enumerate() {
        let (mean, std) = mean_std(&folds.iter().map(|f| f.values[i].value).collect::<Vec<_>>());
        let (per_mean, per_std) = match &v.per_label {
            None => (None, None),
            Some(per) => {
                let (a, b): (Vec<f64>, Vec<f64>) = (0..per.len())
                    .map(|l| {
                        mean_std(
                            &folds
                                .iter()
                                .map(|f| f.values[i].per_label.as_ref().expect("same shape")[l])
                                .collect::<Vec<_>>(),
                        )
                    })
                    .unzip();
                (Some(a), Some(b))
            }
        };
        means.push(MeasureValue {
            measure: v.measure,
            value: mean,
            per_label: per_mean,
        });
        stds.push(MeasureValue {
            measure: v.measure,
            value: std,
            per_label: per_std,
        });
    }
    (means, stds)
}

pub fn evaluate_holdout(
    spec: &ClassifierSpec,
    train: &MimlDataset,
    test: &MimlDataset,
    measures: &[Measure],
    per_label: bool,
) -> Result<EvaluationResult, EvalError> {
    Evaluator::new(measures.to_vec(), per_label).holdout(spec, train, test)
}

pub fn evaluate_cv(
    spec: &ClassifierSpec,
    ds: &MimlDataset,
    k: usize,
    seed: u64,
    strategy: Strategy,
    measures: &[Measure],
    per_label: bool,
) -> Result<EvaluationResult, EvalError> {
    Evaluator::new(measures.to_vec(), per_label).cross_validate(spec, ds, k, seed, strategy)
}
