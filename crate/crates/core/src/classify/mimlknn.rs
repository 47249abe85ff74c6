use super::linalg::ridge_least_squares;
use super::neighbors::{k_nearest, NeighborIndex};
use super::{ClassifierSpec, ClassifyError, Learner, Model, ParamReader, Prediction, TrainedModel};
use crate::data::{Bag, MimlDataset};
use crate::distance::BagDistanceKind;
use crate::par::Execution;

/// Regularization added to the least-squares fit of the label mapping.
pub const RIDGE: f64 = 1e-6;

/// MIMLkNN: each bag is described by how often each label occurs among its
/// references (nearest training bags) and citers (training bags that count
/// it among their own nearest), and a linear map from those counts to
/// `±1` targets is fitted by regularized least squares.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MimlKnn {
    /// `None` means `round(sqrt(m))`, capped at `m - 1`.
    pub references: Option<usize>,
    pub citers: Option<usize>,
    pub metric: BagDistanceKind,
}

impl MimlKnn {
    pub fn from_spec(spec: &ClassifierSpec) -> Result<Self, ClassifyError> {
        let mut p = ParamReader::new(spec);
        let learner = Self {
            references: p.count("nReferences")?,
            citers: p.count("nCiters")?,
            metric: p.metric()?.unwrap_or_default(),
        };
        p.finish()?;
        Ok(learner)
    }
}

pub(crate) fn default_neighbors(m: usize) -> usize {
    ((m as f64).sqrt().round() as usize).clamp(1, m.saturating_sub(1).max(1))
}

pub(crate) fn check_below(name: &str, value: usize, m: usize) -> Result<(), ClassifyError> {
    if value >= m {
        return Err(ClassifyError::bad(
            name,
            format!("{value} must be smaller than the {m} training bags"),
        ));
    }
    Ok(())
}

#[derive(Debug)]
struct MimlKnnModel {
    index: NeighborIndex,
    labels: Vec<bool>,
    q: usize,
    references: usize,
    /// Distance from each training bag to its `c`-th nearest other bag.
    citer_radius: Vec<f64>,
    /// Row-major `q × q`: `weights[k][l]` maps count `k` to label `l`.
    weights: Vec<f64>,
}

impl MimlKnnModel {
    fn confidences(&self, counts: &[f64]) -> Vec<f64> {
        (0..self.q)
            .map(|l| (0..self.q).map(|k| self.weights[k * self.q + l] * counts[k]).sum())
            .collect()
    }

    fn count_labels(&self, members: &[bool]) -> Vec<f64> {
        let mut counts = vec![0.0; self.q];
        for (j, _) in members.iter().enumerate().filter(|(_, &on)| on) {
            for (l, c) in counts.iter_mut().enumerate() {
                if self.labels[j * self.q + l] {
                    *c += 1.0;
                }
            }
        }
        counts
    }
}

impl Model for MimlKnnModel {
    fn predict(&self, bag: &Bag) -> Prediction {
        let d = self.index.query(bag);
        let mut members: Vec<bool> = d.iter().zip(&self.citer_radius).map(|(dj, rj)| dj < rj).collect();
        for j in k_nearest(&d, self.references, None) {
            members[j] = true;
        }
        let counts = self.count_labels(&members);
        Prediction::thresholded(self.confidences(&counts), 0.0)
    }
}

impl Learner for MimlKnn {
    fn fit(&self, ds: &MimlDataset, exec: Execution) -> Result<TrainedModel, ClassifyError> {
        let m = ds.num_bags();
        let q = ds.num_labels();
        if m < 2 {
            return Err(ClassifyError::bad(
                "nReferences",
                "at least two training bags are needed",
            ));
        }
        let r = self.references.unwrap_or_else(|| default_neighbors(m));
        let c = self.citers.unwrap_or_else(|| default_neighbors(m));
        check_below("nReferences", r, m)?;
        check_below("nCiters", c, m)?;

        let index = NeighborIndex::new(self.metric, ds.bags())?;
        let dist = index.pairwise(exec);
        let mut members = vec![vec![false; m]; m];
        let mut citer_radius = vec![0.0; m];
        for j in 0..m {
            let row = dist.row(j);
            for &i in &k_nearest(row, r, Some(j)) {
                members[j][i] = true;
            }
            let cited = k_nearest(row, c, Some(j));
            citer_radius[j] = row[cited[c - 1]];
            for &i in &cited {
                members[i][j] = true;
            }
        }

        let labels: Vec<bool> = ds.labels().rows().flatten().copied().collect();
        let mut model = MimlKnnModel {
            index,
            labels,
            q,
            references: r,
            citer_radius,
            weights: Vec::new(),
        };
        let counts: Vec<f64> = members.iter().flat_map(|mem| model.count_labels(mem)).collect();
        let targets: Vec<f64> = model.labels.iter().map(|&y| if y { 1.0 } else { -1.0 }).collect();
        model.weights = ridge_least_squares(&counts, m, q, &targets, q, RIDGE);
        Ok(TrainedModel::new(ds.dim(), q, Box::new(model)))
    }
}
