//! Classifiers that solve a MIML problem through a reduction: bag
//! aggregation to multi-label data, or binary relevance / label powerset to
//! multi-instance data.

use std::fmt;
use std::str::FromStr;

use super::mapknn::fit_map;
use super::mimlknn::check_below;
use super::neighbors::{k_nearest, NeighborIndex};
use super::{ClassifierSpec, ClassifyError, Learner, Model, ParamReader, Prediction, TrainedModel, DEFAULT_K};
use crate::data::{Bag, MimlDataset};
use crate::distance::{BagDistanceKind, Hausdorff};
use crate::par::Execution;
use crate::transform::{to_mi_lp, BagAggregation, LabelsetDictionary};

fn class_name(key: &str) -> &str {
    key.rsplit('.').next().unwrap_or(key)
}

/// Multi-label learners available behind [`MimlToMl`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MlBaseLearner {
    /// Per-label kNN vote (`ml.BRkNN`).
    BrKnn { k: usize },
    /// kNN vote over whole labelsets (`ml.LPkNN`).
    LpKnn { k: usize },
    /// Per-label MAP rule over neighbour counts (`ml.MLkNN`).
    MlKnn { k: usize },
}

impl MlBaseLearner {
    pub fn from_spec(spec: &ClassifierSpec) -> Result<Self, ClassifyError> {
        let mut p = ParamReader::new(spec);
        let k = p.count("k")?.unwrap_or(DEFAULT_K);
        let base = match class_name(&spec.key) {
            "BRkNN" => MlBaseLearner::BrKnn { k },
            "LPkNN" => MlBaseLearner::LpKnn { k },
            "MLkNN" => MlBaseLearner::MlKnn { k },
            _ => return Err(ClassifyError::UnknownAlgorithm(spec.key.clone())),
        };
        p.finish()?;
        Ok(base)
    }
}

/// Multi-instance learners available behind [`MimlToMi`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MiBaseLearner {
    /// Votes of the `references` nearest bags plus every training bag that
    /// would count the query among its `citers` nearest (`mi.CitationKNN`).
    CitationKnn {
        references: usize,
        citers: usize,
        metric: BagDistanceKind,
    },
    /// kNN over aggregated bags (`mi.SimpleMI`).
    SimpleMi { aggregation: BagAggregation, k: usize },
}

impl MiBaseLearner {
    pub fn from_spec(spec: &ClassifierSpec) -> Result<Self, ClassifyError> {
        let mut p = ParamReader::new(spec);
        let base = match class_name(&spec.key) {
            "CitationKNN" => MiBaseLearner::CitationKnn {
                references: p.count("nReferences")?.unwrap_or(1),
                citers: p.count("nCiters")?.unwrap_or(1),
                metric: p.metric()?.unwrap_or_default(),
            },
            "SimpleMI" => MiBaseLearner::SimpleMi {
                aggregation: aggregation_param(&mut p)?,
                k: p.count("k")?.unwrap_or(DEFAULT_K),
            },
            _ => return Err(ClassifyError::UnknownAlgorithm(spec.key.clone())),
        };
        p.finish()?;
        Ok(base)
    }
}

fn aggregation_param(p: &mut ParamReader<'_>) -> Result<BagAggregation, ClassifyError> {
    match p.text("transformation")? {
        None => Ok(BagAggregation::Arithmetic),
        Some(v) => v.parse().map_err(|e: String| ClassifyError::bad("transformation", e)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MiTransformation {
    BinaryRelevance,
    LabelPowerset,
}

impl MiTransformation {
    pub fn key(self) -> &'static str {
        match self {
            MiTransformation::BinaryRelevance => "transform.BR",
            MiTransformation::LabelPowerset => "transform.LP",
        }
    }
}

impl fmt::Display for MiTransformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for MiTransformation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match class_name(s) {
            "BR" | "BinaryRelevance" | "BRTransformation" => Ok(MiTransformation::BinaryRelevance),
            "LP" | "LabelPowerset" | "LPTransformation" => Ok(MiTransformation::LabelPowerset),
            _ => Err(format!("unknown transformation '{s}'")),
        }
    }
}

/// The training bags that vote for a query bag.
#[derive(Debug)]
enum Voters {
    Nearest {
        index: NeighborIndex,
        k: usize,
        aggregation: BagAggregation,
    },
    Citation {
        index: NeighborIndex,
        references: usize,
        /// Distance from each training bag to its `citers`-th nearest other bag.
        radius: Vec<f64>,
    },
}

fn singleton(id: &str, aggregation: BagAggregation, bag: &Bag) -> Bag {
    let row = aggregation.aggregate(bag);
    Bag::from_parts(id.to_string(), row.len(), row)
}

fn aggregated_index(aggregation: BagAggregation, bags: &[Bag]) -> Result<NeighborIndex, ClassifyError> {
    let rows: Vec<Bag> = bags.iter().map(|b| singleton(b.id(), aggregation, b)).collect();
    // On single-instance bags every Hausdorff variant is the Euclidean distance.
    Ok(NeighborIndex::new(BagDistanceKind::new(Hausdorff::Maximal), &rows)?)
}

impl Voters {
    fn nearest(aggregation: BagAggregation, k: usize, bags: &[Bag]) -> Result<Self, ClassifyError> {
        if k > bags.len() {
            return Err(ClassifyError::bad(
                "k",
                format!("{k} exceeds the {} training bags", bags.len()),
            ));
        }
        Ok(Voters::Nearest {
            index: aggregated_index(aggregation, bags)?,
            k,
            aggregation,
        })
    }

    fn build(base: MiBaseLearner, bags: &[Bag], exec: Execution) -> Result<Self, ClassifyError> {
        match base {
            MiBaseLearner::SimpleMi { aggregation, k } => Self::nearest(aggregation, k, bags),
            MiBaseLearner::CitationKnn {
                references,
                citers,
                metric,
            } => {
                let m = bags.len();
                if references > m {
                    return Err(ClassifyError::bad(
                        "nReferences",
                        format!("{references} exceeds the {m} training bags"),
                    ));
                }
                check_below("nCiters", citers, m)?;
                let index = NeighborIndex::new(metric, bags)?;
                let dist = index.pairwise(exec);
                let radius = (0..m)
                    .map(|j| {
                        let row = dist.row(j);
                        row[k_nearest(row, citers, Some(j))[citers - 1]]
                    })
                    .collect();
                Ok(Voters::Citation {
                    index,
                    references,
                    radius,
                })
            }
        }
    }

    /// Distinct voting training indices, ascending.
    fn voters(&self, bag: &Bag) -> Vec<usize> {
        match self {
            Voters::Nearest { index, k, aggregation } => {
                let d = index.query(&singleton(bag.id(), *aggregation, bag));
                let mut nn = k_nearest(&d, *k, None);
                nn.sort_unstable();
                nn
            }
            Voters::Citation {
                index,
                references,
                radius,
            } => {
                let d = index.query(bag);
                let mut on: Vec<bool> = d.iter().zip(radius).map(|(dj, rj)| dj < rj).collect();
                for j in k_nearest(&d, *references, None) {
                    on[j] = true;
                }
                on.iter().enumerate().filter(|(_, &v)| v).map(|(j, _)| j).collect()
            }
        }
    }
}

/// How voters' labels become a prediction.
#[derive(Debug)]
enum Decision {
    /// Per label: confidence is the share of voters carrying it; positive at `>= 0.5`.
    BinaryRelevance { labels: Vec<bool>, q: usize },
    /// The most voted labelset wins (ties to the labelset seen first in
    /// training); a label's confidence is the total vote share of the
    /// labelsets that contain it.
    LabelPowerset {
        targets: Vec<usize>,
        dict: LabelsetDictionary,
        q: usize,
    },
}

impl Decision {
    fn new(transformation: MiTransformation, ds: &MimlDataset) -> Self {
        let q = ds.num_labels();
        match transformation {
            MiTransformation::BinaryRelevance => Decision::BinaryRelevance {
                labels: ds.labels().rows().flatten().copied().collect(),
                q,
            },
            MiTransformation::LabelPowerset => {
                let (mi, dict) = to_mi_lp(ds);
                Decision::LabelPowerset {
                    targets: mi.targets,
                    dict,
                    q,
                }
            }
        }
    }

    fn decide(&self, voters: &[usize]) -> Prediction {
        let n = voters.len() as f64;
        match self {
            Decision::BinaryRelevance { labels, q } => {
                let conf = (0..*q)
                    .map(|l| voters.iter().filter(|&&j| labels[j * q + l]).count() as f64 / n)
                    .collect();
                Prediction::thresholded(conf, 0.5)
            }
            Decision::LabelPowerset { targets, dict, q } => {
                let mut votes = vec![0usize; dict.len()];
                for &j in voters {
                    votes[targets[j]] += 1;
                }
                let mut best = 0;
                for (c, &v) in votes.iter().enumerate() {
                    if v > votes[best] {
                        best = c;
                    }
                }
                let confidences = (0..*q)
                    .map(|l| {
                        let support: usize = (0..dict.len()).filter(|&c| dict.decode(c)[l]).map(|c| votes[c]).sum();
                        support as f64 / n
                    })
                    .collect();
                Prediction {
                    bipartition: dict.decode(best).to_vec(),
                    confidences,
                }
            }
        }
    }
}

#[derive(Debug)]
struct VotingModel {
    voters: Voters,
    decision: Decision,
}

impl Model for VotingModel {
    fn predict(&self, bag: &Bag) -> Prediction {
        self.decision.decide(&self.voters.voters(bag))
    }
}

/// Aggregates a bag to one vector before handing it to `inner`.
#[derive(Debug)]
struct AggregatingModel {
    aggregation: BagAggregation,
    inner: Box<dyn Model>,
}

impl Model for AggregatingModel {
    fn predict(&self, bag: &Bag) -> Prediction {
        self.inner.predict(&singleton(bag.id(), self.aggregation, bag))
    }
}

/// Reduces each bag to one feature vector and trains a multi-label learner.
#[derive(Debug, Clone, PartialEq)]
pub struct MimlToMl {
    pub aggregation: BagAggregation,
    pub base: MlBaseLearner,
}

impl MimlToMl {
    pub fn from_spec(spec: &ClassifierSpec) -> Result<Self, ClassifyError> {
        let mut p = ParamReader::new(spec);
        let aggregation = aggregation_param(&mut p)?;
        let base = p
            .nested("baseClassifier")?
            .ok_or_else(|| ClassifyError::bad("baseClassifier", "is required"))?;
        let base = MlBaseLearner::from_spec(&base)?;
        p.finish()?;
        Ok(Self { aggregation, base })
    }
}

impl Learner for MimlToMl {
    fn fit(&self, ds: &MimlDataset, exec: Execution) -> Result<TrainedModel, ClassifyError> {
        let q = ds.num_labels();
        let model: Box<dyn Model> = match self.base {
            MlBaseLearner::BrKnn { k } => Box::new(VotingModel {
                voters: Voters::nearest(self.aggregation, k, ds.bags())?,
                decision: Decision::new(MiTransformation::BinaryRelevance, ds),
            }),
            MlBaseLearner::LpKnn { k } => Box::new(VotingModel {
                voters: Voters::nearest(self.aggregation, k, ds.bags())?,
                decision: Decision::new(MiTransformation::LabelPowerset, ds),
            }),
            MlBaseLearner::MlKnn { k } => {
                let index = aggregated_index(self.aggregation, ds.bags())?;
                let labels = ds.labels().rows().flatten().copied().collect();
                Box::new(AggregatingModel {
                    aggregation: self.aggregation,
                    inner: fit_map(index, labels, q, k, 1.0, exec)?,
                })
            }
        };
        Ok(TrainedModel::new(ds.dim(), q, model))
    }
}

/// Reduces the label set by binary relevance or label powerset and trains a
/// multi-instance learner. The neighbour structure is built once and shared
/// by every label.
#[derive(Debug, Clone, PartialEq)]
pub struct MimlToMi {
    pub transformation: MiTransformation,
    pub base: MiBaseLearner,
}

impl MimlToMi {
    pub fn from_spec(spec: &ClassifierSpec) -> Result<Self, ClassifyError> {
        let mut p = ParamReader::new(spec);
        let transformation = match p.text("transformation")? {
            None => MiTransformation::BinaryRelevance,
            Some(v) => v.parse().map_err(|e: String| ClassifyError::bad("transformation", e))?,
        };
        let base = p
            .nested("baseClassifier")?
            .ok_or_else(|| ClassifyError::bad("baseClassifier", "is required"))?;
        let base = MiBaseLearner::from_spec(&base)?;
        p.finish()?;
        Ok(Self { transformation, base })
    }
}

impl Learner for MimlToMi {
    fn fit(&self, ds: &MimlDataset, exec: Execution) -> Result<TrainedModel, ClassifyError> {
        let model = VotingModel {
            voters: Voters::build(self.base, ds.bags(), exec)?,
            decision: Decision::new(self.transformation, ds),
        };
        Ok(TrainedModel::new(ds.dim(), ds.num_labels(), Box::new(model)))
    }
}
