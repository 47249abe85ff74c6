//! The MIML classifier abstraction, the registry that maps configuration
//! keys to learners, and the built-in learners.
//!
//! A [`Learner`] is a configured, untrained algorithm; [`Learner::fit`]
//! produces a [`TrainedModel`] that predicts one bag at a time. New
//! algorithms plug in by implementing both traits and registering a factory
//! under a dotted key.
//!
//! | key | algorithm |
//! |-----|-----------|
//! | `classifiers.lazy.MIMLkNN` | citation neighbourhoods + least-squares label mapping |
//! | `classifiers.lazy.MIMLBRkNN` | per-label kNN vote |
//! | `classifiers.lazy.MIMLMAPkNN` | per-label MAP rule over neighbour counts |
//! | `classifiers.meta.MIMLBagging` | bootstrap ensemble of any registered classifier |
//! | `classifiers.mimlTOml.MIMLClassifierToML` | bag aggregation + `ml.BRkNN` / `ml.LPkNN` / `ml.MLkNN` |
//! | `classifiers.mimlTOmi.MIMLClassifierToMI` | BR or LP + `mi.CitationKNN` / `mi.SimpleMI` |
//!
//! Keys may also be written with the `miml.` / `classifiers.miml.` package
//! prefix (`miml.classifiers.miml.lazy.MIMLkNN`) or as the bare class name.
//!
//! Nearest-neighbour ties are always broken by lower training index.

mod bagging;
mod brknn;
mod linalg;
mod mapknn;
mod mimlknn;
mod neighbors;
mod params;
mod wrappers;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::data::{Bag, DataError, MimlDataset};
use crate::distance::{BagDistanceKind, DistanceError};
use crate::par::Execution;

pub use bagging::MimlBagging;
pub use brknn::MimlBrKnn;
pub use linalg::ridge_least_squares;
pub use mapknn::MimlMapKnn;
pub use mimlknn::{MimlKnn, RIDGE};
pub use params::ParamReader;
pub use wrappers::{MiBaseLearner, MiTransformation, MimlToMi, MimlToMl, MlBaseLearner};

/// Default neighbour count for the kNN-family learners.
pub const DEFAULT_K: usize = 10;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("unknown algorithm '{0}'")]
    UnknownAlgorithm(String),
    #[error("bad parameter '{name}': {reason}")]
    BadParameter { name: String, reason: String },
    #[error("bag dimension {found} does not match the training dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Distance(#[from] DistanceError),
    #[error(transparent)]
    Data(#[from] DataError),
}

impl ClassifyError {
    pub(crate) fn bad(name: &str, reason: impl Into<String>) -> Self {
        ClassifyError::BadParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}

/// Per-label decisions plus real-valued confidences (higher = more positive).
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub bipartition: Vec<bool>,
    pub confidences: Vec<f64>,
}

impl Prediction {
    /// Bipartition from confidences with `confidence >= threshold`.
    pub fn thresholded(confidences: Vec<f64>, threshold: f64) -> Self {
        Self {
            bipartition: confidences.iter().map(|&c| c >= threshold).collect(),
            confidences,
        }
    }
}

/// One parameter value from a classifier specification.
#[derive(Debug, Clone, PartialEq)]
pub enum Param {
    /// Scalar text, typed by the algorithm that reads it.
    Value(String),
    /// A `<metric name="..."/>` element.
    Metric { name: String, normalize: bool },
    /// A nested classifier (`<baseClassifier name="...">`).
    Classifier(ClassifierSpec),
}

/// Algorithm key plus parameters, as read from a configuration file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClassifierSpec {
    pub key: String,
    pub params: BTreeMap<String, Param>,
}

impl ClassifierSpec {
    pub fn new(key: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: &str, value: impl fmt::Display) -> Self {
        self.params.insert(name.to_string(), Param::Value(value.to_string()));
        self
    }

    pub fn with_metric(mut self, kind: BagDistanceKind) -> Self {
        self.params.insert(
            "metric".to_string(),
            Param::Metric {
                name: kind.variant.key().to_string(),
                normalize: kind.normalize,
            },
        );
        self
    }

    pub fn with_classifier(mut self, name: &str, spec: ClassifierSpec) -> Self {
        self.params.insert(name.to_string(), Param::Classifier(spec));
        self
    }
}

pub trait Model: Send + Sync + fmt::Debug {
    /// `bag` has already been checked against the training dimension.
    fn predict(&self, bag: &Bag) -> Prediction;
}

/// A fitted classifier. Immutable; `predict` may be called concurrently.
#[derive(Debug)]
pub struct TrainedModel {
    dim: usize,
    num_labels: usize,
    inner: Box<dyn Model>,
}

impl TrainedModel {
    pub fn new(dim: usize, num_labels: usize, inner: Box<dyn Model>) -> Self {
        Self { dim, num_labels, inner }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    pub fn predict(&self, bag: &Bag) -> Result<Prediction, ClassifyError> {
        if bag.dim() != self.dim {
            return Err(ClassifyError::DimensionMismatch {
                expected: self.dim,
                found: bag.dim(),
            });
        }
        let p = self.inner.predict(bag);
        debug_assert_eq!(p.confidences.len(), self.num_labels);
        Ok(p)
    }
}

pub trait Learner: Send + Sync + fmt::Debug {
    fn fit(&self, ds: &MimlDataset, exec: Execution) -> Result<TrainedModel, ClassifyError>;
}

pub type LearnerFactory = fn(&ClassifierSpec, &Registry) -> Result<Box<dyn Learner>, ClassifyError>;

/// Maps canonical keys to learner factories.
#[derive(Clone)]
pub struct Registry {
    entries: BTreeMap<String, LearnerFactory>,
}

impl fmt::Debug for Registry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries.keys()).finish()
    }
}

impl Default for Registry {
    fn default() -> Self {
        Self::builtin()
    }
}

fn boxed<L: Learner + 'static>(r: Result<L, ClassifyError>) -> Result<Box<dyn Learner>, ClassifyError> {
    r.map(|l| Box::new(l) as Box<dyn Learner>)
}

impl Registry {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register("classifiers.lazy.MIMLkNN", |s, _| boxed(MimlKnn::from_spec(s)));
        r.register("classifiers.lazy.MIMLBRkNN", |s, _| boxed(MimlBrKnn::from_spec(s)));
        r.register("classifiers.lazy.MIMLMAPkNN", |s, _| boxed(MimlMapKnn::from_spec(s)));
        r.register("classifiers.meta.MIMLBagging", |s, reg| {
            boxed(MimlBagging::from_spec(s, reg))
        });
        r.register("classifiers.mimlTOml.MIMLClassifierToML", |s, _| {
            boxed(MimlToMl::from_spec(s))
        });
        r.register("classifiers.mimlTOmi.MIMLClassifierToMI", |s, _| {
            boxed(MimlToMi::from_spec(s))
        });
        r
    }

    pub fn register(&mut self, key: &str, factory: LearnerFactory) {
        self.entries.insert(key.to_string(), factory);
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Canonical key for `key`, accepting package-qualified and bare forms.
    pub fn resolve(&self, key: &str) -> Option<&str> {
        let stripped = key.strip_prefix("miml.").unwrap_or(key);
        let canonical = stripped
            .strip_prefix("classifiers.miml.")
            .map(|rest| format!("classifiers.{rest}"))
            .unwrap_or_else(|| stripped.to_string());
        if let Some((k, _)) = self.entries.get_key_value(&canonical) {
            return Some(k);
        }
        if !key.contains('.') {
            let mut hits = self.entries.keys().filter(|k| k.rsplit('.').next() == Some(key));
            if let (Some(k), None) = (hits.next(), hits.next()) {
                return Some(k);
            }
        }
        None
    }

    /// Resolves `spec.key` and validates every parameter.
    pub fn build(&self, spec: &ClassifierSpec) -> Result<Box<dyn Learner>, ClassifyError> {
        let key = self
            .resolve(&spec.key)
            .ok_or_else(|| ClassifyError::UnknownAlgorithm(spec.key.clone()))?;
        (self.entries[key])(spec, self)
    }
}

/// Builds the learner named by `spec` from the built-in registry and fits it.
pub fn train(spec: &ClassifierSpec, ds: &MimlDataset) -> Result<TrainedModel, ClassifyError> {
    train_with(spec, ds, Execution::default())
}

pub fn train_with(spec: &ClassifierSpec, ds: &MimlDataset, exec: Execution) -> Result<TrainedModel, ClassifyError> {
    Registry::builtin().build(spec)?.fit(ds, exec)
}

pub fn predict(model: &TrainedModel, bag: &Bag) -> Result<Prediction, ClassifyError> {
    model.predict(bag)
}
