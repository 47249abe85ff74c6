use super::mimlknn::check_below;
use super::neighbors::{k_nearest, NeighborIndex};
use super::{ClassifierSpec, ClassifyError, Learner, Model, ParamReader, Prediction, TrainedModel, DEFAULT_K};
use crate::data::{Bag, MimlDataset};
use crate::distance::BagDistanceKind;
use crate::par::Execution;

/// Per-label maximum a posteriori rule over the number of positive
/// neighbours, with Laplace smoothing `s`. Neighbour-count likelihoods are
/// estimated leave-one-out on the training set.
///
/// ```text
/// P(H1)        = (s + #positives) / (2s + m)
/// P(C=j | H1)  = (s + c1[j]) / (s(k+1) + Σ c1)
/// confidence   = P(H1)P(C|H1) / (P(H1)P(C|H1) + P(H0)P(C|H0))
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct MimlMapKnn {
    pub k: usize,
    pub smooth: f64,
    pub metric: BagDistanceKind,
}

impl Default for MimlMapKnn {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            smooth: 1.0,
            metric: BagDistanceKind::default(),
        }
    }
}

impl MimlMapKnn {
    pub fn from_spec(spec: &ClassifierSpec) -> Result<Self, ClassifyError> {
        let mut p = ParamReader::new(spec);
        let learner = Self {
            k: p.count("k")?.unwrap_or(DEFAULT_K),
            smooth: p.parse("smooth")?.unwrap_or(1.0),
            metric: p.metric()?.unwrap_or_default(),
        };
        p.finish()?;
        if !(learner.smooth.is_finite() && learner.smooth > 0.0) {
            return Err(ClassifyError::bad("smooth", "must be a positive number"));
        }
        Ok(learner)
    }
}

/// Posterior table: `posterior[l * (k+1) + j]` for `j` positive neighbours.
pub(crate) fn posterior_table(neighbor_counts: &[Vec<usize>], labels: &[bool], q: usize, k: usize, s: f64) -> Vec<f64> {
    let m = neighbor_counts.len();
    let mut table = Vec::with_capacity(q * (k + 1));
    for l in 0..q {
        let mut c1 = vec![0usize; k + 1];
        let mut c0 = vec![0usize; k + 1];
        let mut positives = 0usize;
        for (i, counts) in neighbor_counts.iter().enumerate() {
            if labels[i * q + l] {
                positives += 1;
                c1[counts[l]] += 1;
            } else {
                c0[counts[l]] += 1;
            }
        }
        let p1 = (s + positives as f64) / (2.0 * s + m as f64);
        let p0 = 1.0 - p1;
        let sum1: usize = c1.iter().sum();
        let sum0: usize = c0.iter().sum();
        for j in 0..=k {
            let l1 = (s + c1[j] as f64) / (s * (k + 1) as f64 + sum1 as f64);
            let l0 = (s + c0[j] as f64) / (s * (k + 1) as f64 + sum0 as f64);
            let a = p1 * l1;
            let b = p0 * l0;
            table.push(a / (a + b));
        }
    }
    table
}

fn count_positive(nn: &[usize], labels: &[bool], q: usize) -> Vec<usize> {
    (0..q)
        .map(|l| nn.iter().filter(|&&j| labels[j * q + l]).count())
        .collect()
}

#[derive(Debug)]
struct MapKnnModel {
    index: NeighborIndex,
    labels: Vec<bool>,
    q: usize,
    k: usize,
    posterior: Vec<f64>,
}

impl Model for MapKnnModel {
    fn predict(&self, bag: &Bag) -> Prediction {
        let nn = k_nearest(&self.index.query(bag), self.k, None);
        let counts = count_positive(&nn, &self.labels, self.q);
        let conf = counts
            .iter()
            .enumerate()
            .map(|(l, &j)| self.posterior[l * (self.k + 1) + j])
            .collect();
        Prediction::thresholded(conf, 0.5)
    }
}

/// Fits the MAP rule over an already built index. `labels` is row-major `m × q`.
pub(crate) fn fit_map(
    index: NeighborIndex,
    labels: Vec<bool>,
    q: usize,
    k: usize,
    smooth: f64,
    exec: Execution,
) -> Result<Box<dyn Model>, ClassifyError> {
    let m = index.len();
    check_below("k", k, m)?;
    let dist = index.pairwise(exec);
    let loo: Vec<Vec<usize>> = (0..m)
        .map(|i| count_positive(&k_nearest(dist.row(i), k, Some(i)), &labels, q))
        .collect();
    let posterior = posterior_table(&loo, &labels, q, k, smooth);
    Ok(Box::new(MapKnnModel {
        index,
        labels,
        q,
        k,
        posterior,
    }))
}

impl Learner for MimlMapKnn {
    fn fit(&self, ds: &MimlDataset, exec: Execution) -> Result<TrainedModel, ClassifyError> {
        let index = NeighborIndex::new(self.metric, ds.bags())?;
        let labels = ds.labels().rows().flatten().copied().collect();
        let model = fit_map(index, labels, ds.num_labels(), self.k, self.smooth, exec)?;
        Ok(TrainedModel::new(ds.dim(), ds.num_labels(), model))
    }
}
