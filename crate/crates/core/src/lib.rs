//! Multi-instance multi-label (MIML) learning: bag-structured datasets,
//! distances between bags, problem transformations, stratified
//! partitioning, lazy MIML classifiers, evaluation and reports, all driven
//! by XML experiment configurations.
//!
//! ```no_run
//! use std::path::Path;
//! use miml_core::classify::{train, ClassifierSpec};
//! use miml_core::data::parse_dataset;
//!
//! let ds = parse_dataset(Path::new("birds.arff"), Path::new("birds.xml"))?;
//! let spec = ClassifierSpec::new("classifiers.lazy.MIMLkNN")
//!     .with("nReferences", 4)
//!     .with("nCiters", 6);
//! let model = train(&spec, &ds)?;
//! let p = model.predict(&ds.bags()[0])?;
//! println!("{:?}", p.bipartition);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```
//!
//! The `parallel` feature (on by default) spreads distance rows, folds and
//! ensemble members across threads with rayon. Results are identical with
//! the feature off or with [`par::Execution::Sequential`].

pub mod classify;
pub mod config;
pub mod data;
pub mod distance;
pub mod eval;
pub mod experiment;
pub mod metrics;
pub mod par;
pub mod partition;
pub mod report;
pub mod rng;
pub mod stats;
pub mod synthetic;
pub mod transform;
pub mod xml;

pub use classify::{ClassifierSpec, Prediction, TrainedModel};
pub use data::{Bag, LabelMatrix, MimlDataset};
pub use par::Execution;
