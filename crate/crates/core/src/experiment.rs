//! Runs a parsed [`ExperimentConfig`]: load data, evaluate, write the report.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::{parse_config, ConfigError, DataSource, ExperimentConfig};
use crate::data::{parse_dataset, select_bags, DataError};
use crate::eval::{EvalError, EvaluationResult, Evaluator, EvaluatorKind};
use crate::par::Execution;
use crate::partition::split_holdout;
use crate::report::{write_report, ReportError};
use crate::xml::Pos;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("data: {0}")]
    Data(#[from] DataError),
    #[error("evaluation: {0}")]
    Eval(#[from] EvalError),
    #[error("report: {0}")]
    Report(#[from] ReportError),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub exec: Execution,
    /// Replace an existing report file.
    pub overwrite: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report_path: PathBuf,
    pub result: EvaluationResult,
}

pub fn run_config_file(path: &Path, opts: RunOptions) -> Result<RunOutcome, ExperimentError> {
    run_experiment(&parse_config(path)?, opts)
}

pub fn run_experiment(cfg: &ExperimentConfig, opts: RunOptions) -> Result<RunOutcome, ExperimentError> {
    let ev = &cfg.evaluator;
    let evaluator = Evaluator::new(cfg.report.measures.clone(), cfg.report.per_label).with_execution(opts.exec);
    let result = match (&ev.kind, &ev.data) {
        (EvaluatorKind::CrossValidation, DataSource::Single { file, xml_file }) => {
            let ds = parse_dataset(file, xml_file)?;
            evaluator.cross_validate(&cfg.classifier, &ds, ev.num_folds, ev.seed, ev.strategy)?
        }
        (EvaluatorKind::Holdout, DataSource::Single { file, xml_file }) => {
            let ds = parse_dataset(file, xml_file)?;
            let fraction = ev.percentage_train.unwrap_or(70.0) / 100.0;
            let (train, test) = split_holdout(&ds, ev.strategy, fraction, ev.seed).map_err(EvalError::from)?;
            let train = select_bags(&ds, &train)?;
            let test = select_bags(&ds, &test)?;
            evaluator.holdout(&cfg.classifier, &train, &test)?
        }
        (
            EvaluatorKind::Holdout,
            DataSource::Split {
                train_file,
                test_file,
                xml_file,
            },
        ) => {
            let train = parse_dataset(train_file, xml_file)?;
            let test = parse_dataset(test_file, xml_file)?;
            evaluator.holdout(&cfg.classifier, &train, &test)?
        }
        (EvaluatorKind::CrossValidation, DataSource::Split { .. }) => {
            return Err(ConfigError::Invalid {
                pos: Pos::default(),
                message: "cross-validation takes a single <file>".to_string(),
            }
            .into());
        }
    };
    write_report(
        &result,
        &cfg.report.file_name,
        &cfg.report.measures,
        cfg.report.per_label,
        opts.overwrite,
    )?;
    Ok(RunOutcome {
        report_path: cfg.report.file_name.clone(),
        result,
    })
}
