use super::neighbors::{k_nearest, NeighborIndex};
use super::{ClassifierSpec, ClassifyError, Learner, Model, ParamReader, Prediction, TrainedModel, DEFAULT_K};
use crate::data::{Bag, MimlDataset};
use crate::distance::BagDistanceKind;
use crate::par::Execution;

/// Binary-relevance kNN: the confidence for a label is the fraction of the
/// `k` nearest training bags carrying it; positive at `>= 0.5`.
#[derive(Debug, Clone, PartialEq)]
pub struct MimlBrKnn {
    pub k: usize,
    pub metric: BagDistanceKind,
}

impl Default for MimlBrKnn {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            metric: BagDistanceKind::default(),
        }
    }
}

impl MimlBrKnn {
    pub fn from_spec(spec: &ClassifierSpec) -> Result<Self, ClassifyError> {
        let mut p = ParamReader::new(spec);
        let learner = Self {
            k: p.count("k")?.unwrap_or(DEFAULT_K),
            metric: p.metric()?.unwrap_or_default(),
        };
        p.finish()?;
        Ok(learner)
    }
}

#[derive(Debug)]
struct BrKnnModel {
    index: NeighborIndex,
    labels: Vec<bool>,
    q: usize,
    k: usize,
}

impl Model for BrKnnModel {
    fn predict(&self, bag: &Bag) -> Prediction {
        let nn = k_nearest(&self.index.query(bag), self.k, None);
        let conf = (0..self.q)
            .map(|l| nn.iter().filter(|&&j| self.labels[j * self.q + l]).count() as f64 / self.k as f64)
            .collect();
        Prediction::thresholded(conf, 0.5)
    }
}

impl Learner for MimlBrKnn {
    fn fit(&self, ds: &MimlDataset, _exec: Execution) -> Result<TrainedModel, ClassifyError> {
        if self.k > ds.num_bags() {
            return Err(ClassifyError::bad(
                "k",
                format!("{} exceeds the {} training bags", self.k, ds.num_bags()),
            ));
        }
        let model = BrKnnModel {
            index: NeighborIndex::new(self.metric, ds.bags())?,
            labels: ds.labels().rows().flatten().copied().collect(),
            q: ds.num_labels(),
            k: self.k,
        };
        Ok(TrainedModel::new(ds.dim(), ds.num_labels(), Box::new(model)))
    }
}
