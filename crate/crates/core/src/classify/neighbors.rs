use std::cmp::Ordering;

use crate::data::Bag;
use crate::distance::{BagDistanceKind, BagMetric, DistanceError, DistanceMatrix};
use crate::par::Execution;

/// Training bags prepared for one metric, with distance queries.
#[derive(Debug, Clone)]
pub(crate) struct NeighborIndex {
    metric: BagMetric,
    bags: Vec<Bag>,
}

impl NeighborIndex {
    /// Normalization ranges, when requested, come from `bags`.
    pub fn new(kind: BagDistanceKind, bags: &[Bag]) -> Result<Self, DistanceError> {
        let metric = BagMetric::fit(kind, bags)?;
        let bags = bags.iter().map(|b| metric.prepare(b)).collect();
        Ok(Self { metric, bags })
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn pairwise(&self, exec: Execution) -> DistanceMatrix {
        DistanceMatrix::build(self.bags.len(), exec, |i, j| {
            self.metric.between_prepared(&self.bags[i], &self.bags[j])
        })
    }

    /// Distances from `bag` to every training bag, in training order.
    pub fn query(&self, bag: &Bag) -> Vec<f64> {
        let q = self.metric.prepare(bag);
        self.bags.iter().map(|b| self.metric.between_prepared(&q, b)).collect()
    }
}

fn by_distance(dists: &[f64]) -> impl Fn(&usize, &usize) -> Ordering + '_ {
    |&a, &b| dists[a].total_cmp(&dists[b]).then(a.cmp(&b))
}

/// The `k` indices with the smallest distance (ties to the lower index),
/// closest first. `exclude` drops one index, for leave-one-out.
pub(crate) fn k_nearest(dists: &[f64], k: usize, exclude: Option<usize>) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..dists.len()).filter(|&i| Some(i) != exclude).collect();
    let cmp = by_distance(dists);
    if k < idx.len() {
        idx.select_nth_unstable_by(k, &cmp);
        idx.truncate(k);
    }
    idx.sort_unstable_by(&cmp);
    idx
}
