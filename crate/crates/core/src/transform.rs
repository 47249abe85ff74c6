//! Reductions of a MIML dataset to single-instance multi-label data
//! (bag aggregation) or to multi-instance single-label data (binary
//! relevance and label powerset).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::data::{Bag, LabelMatrix, MimlDataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BagAggregation {
    /// Per-attribute mean over the bag's instances.
    Arithmetic,
    /// Per-attribute midpoint `(min + max) / 2`.
    Geometric,
    /// `[min_1..min_d, max_1..max_d]`.
    MinMax,
}

impl BagAggregation {
    pub fn key(self) -> &'static str {
        match self {
            BagAggregation::Arithmetic => "transform.Arithmetic",
            BagAggregation::Geometric => "transform.Geometric",
            BagAggregation::MinMax => "transform.MinMax",
        }
    }

    pub fn output_dim(self, dim: usize) -> usize {
        match self {
            BagAggregation::MinMax => 2 * dim,
            _ => dim,
        }
    }

    pub fn aggregate(self, bag: &Bag) -> Vec<f64> {
        let d = bag.dim();
        let mut mins = vec![f64::INFINITY; d];
        let mut maxs = vec![f64::NEG_INFINITY; d];
        let mut sums = vec![0.0; d];
        for inst in bag.instances() {
            for (j, &v) in inst.iter().enumerate() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
                sums[j] += v;
            }
        }
        match self {
            BagAggregation::Arithmetic => {
                let n = bag.len() as f64;
                // A mean can drift past the extremes by one rounding step.
                sums.iter()
                    .zip(mins.iter().zip(&maxs))
                    .map(|(s, (lo, hi))| (s / n).clamp(*lo, *hi))
                    .collect()
            }
            BagAggregation::Geometric => mins
                .iter()
                .zip(&maxs)
                .map(|(lo, hi)| ((lo + hi) / 2.0).clamp(*lo, *hi))
                .collect(),
            BagAggregation::MinMax => {
                mins.extend_from_slice(&maxs);
                mins
            }
        }
    }
}

impl fmt::Display for BagAggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for BagAggregation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bare = s.rsplit('.').next().unwrap_or(s);
        let prefix = &s[..s.len() - bare.len()];
        if !matches!(
            prefix,
            "" | "transform." | "transformation.mimlTOml." | "miml.transformation.mimlTOml."
        ) {
            return Err(format!("unknown bag transformation '{s}'"));
        }
        match bare {
            "Arithmetic" | "ArithmeticTransformation" => Ok(BagAggregation::Arithmetic),
            "Geometric" | "GeometricTransformation" => Ok(BagAggregation::Geometric),
            "MinMax" | "Min-Max" | "MinMaxTransformation" => Ok(BagAggregation::MinMax),
            _ => Err(format!("unknown bag transformation '{s}'")),
        }
    }
}

/// Single-instance multi-label view: one feature row per bag.
#[derive(Debug, Clone, PartialEq)]
pub struct MlDataset {
    pub dim: usize,
    /// Row-major `m × dim`.
    pub features: Vec<f64>,
    pub labels: LabelMatrix,
}

impl MlDataset {
    pub fn num_rows(&self) -> usize {
        self.labels.num_rows()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }
}

pub fn to_ml(ds: &MimlDataset, method: BagAggregation) -> MlDataset {
    let features = ds.bags().iter().flat_map(|b| method.aggregate(b)).collect();
    MlDataset {
        dim: method.output_dim(ds.dim()),
        features,
        labels: ds.labels().clone(),
    }
}

/// Multi-instance single-label view. Bags are shared, not copied.
#[derive(Debug, Clone, PartialEq)]
pub struct MiDataset {
    pub bags: Arc<[Bag]>,
    /// Class index per bag (0/1 for binary relevance, labelset id for powerset).
    pub targets: Vec<usize>,
    pub num_classes: usize,
}

/// One binary dataset per label; dataset `l` has target `labels[i][l]`.
pub fn to_mi_br(ds: &MimlDataset) -> Vec<MiDataset> {
    let bags = ds.shared_bags();
    (0..ds.num_labels())
        .map(|l| MiDataset {
            bags: Arc::clone(&bags),
            targets: (0..ds.num_bags()).map(|i| usize::from(ds.labels().get(i, l))).collect(),
            num_classes: 2,
        })
        .collect()
}

/// Maps each distinct labelset to a class id, in first-occurrence order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabelsetDictionary {
    labelsets: Vec<Vec<bool>>,
    ids: HashMap<Vec<bool>, usize>,
}

impl LabelsetDictionary {
    pub fn encode_or_insert(&mut self, labelset: &[bool]) -> usize {
        if let Some(&id) = self.ids.get(labelset) {
            return id;
        }
        let id = self.labelsets.len();
        self.labelsets.push(labelset.to_vec());
        self.ids.insert(labelset.to_vec(), id);
        id
    }

    pub fn encode(&self, labelset: &[bool]) -> Option<usize> {
        self.ids.get(labelset).copied()
    }

    pub fn decode(&self, id: usize) -> &[bool] {
        &self.labelsets[id]
    }

    pub fn len(&self) -> usize {
        self.labelsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labelsets.is_empty()
    }
}

/// Label powerset: each bag's target is the id of its exact labelset.
pub fn to_mi_lp(ds: &MimlDataset) -> (MiDataset, LabelsetDictionary) {
    let mut dict = LabelsetDictionary::default();
    let targets = ds.labels().rows().map(|r| dict.encode_or_insert(r)).collect();
    (
        MiDataset {
            bags: ds.shared_bags(),
            targets,
            num_classes: dict.len(),
        },
        dict,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::fixtures::dataset;
    use crate::stats::label_stats;
    use proptest::prelude::*;

    #[test]
    fn hand_evaluated_aggregations() {
        let ds = dataset(&[(vec![vec![0.0, 0.0], vec![2.0, 4.0]], vec![true, false])]);
        assert_eq!(to_ml(&ds, BagAggregation::Arithmetic).features, vec![1.0, 2.0]);
        assert_eq!(to_ml(&ds, BagAggregation::Geometric).features, vec![1.0, 2.0]);
        let mm = to_ml(&ds, BagAggregation::MinMax);
        assert_eq!(mm.features, vec![0.0, 0.0, 2.0, 4.0]);
        assert_eq!(mm.dim, 4);
        assert_eq!(mm.labels, *ds.labels());
    }

    #[test]
    fn single_instance_bag_is_reproduced() {
        let ds = dataset(&[(vec![vec![1.5, -3.0]], vec![true, true])]);
        assert_eq!(to_ml(&ds, BagAggregation::Arithmetic).features, vec![1.5, -3.0]);
        assert_eq!(to_ml(&ds, BagAggregation::Geometric).features, vec![1.5, -3.0]);
        assert_eq!(to_ml(&ds, BagAggregation::MinMax).features, vec![1.5, -3.0, 1.5, -3.0]);
    }

    #[test]
    fn binary_relevance_mapping() {
        let ds = dataset(&[
            (vec![vec![0.0]], vec![true, false]),
            (vec![vec![1.0]], vec![false, true]),
        ]);
        let br = to_mi_br(&ds);
        assert_eq!(br.len(), 2);
        assert_eq!(br[0].targets, vec![1, 0]);
        assert_eq!(br[1].targets, vec![0, 1]);
        assert!(Arc::ptr_eq(&br[0].bags, &br[1].bags));
    }

    #[test]
    fn all_negative_column() {
        let ds = dataset(&[
            (vec![vec![0.0]], vec![true, false]),
            (vec![vec![1.0]], vec![true, false]),
        ]);
        assert_eq!(to_mi_br(&ds)[1].targets, vec![0, 0]);
    }

    #[test]
    fn powerset_grouping() {
        let ds = dataset(&[
            (vec![vec![0.0]], vec![true, false]),
            (vec![vec![1.0]], vec![true, false]),
            (vec![vec![2.0]], vec![false, true]),
        ]);
        let (mi, dict) = to_mi_lp(&ds);
        assert_eq!(mi.num_classes, 2);
        assert_eq!(mi.targets, vec![0, 0, 1]);
        assert_eq!(dict.decode(1), &[false, true]);
        let same = dataset(&[(vec![vec![0.0]], vec![true, true]), (vec![vec![1.0]], vec![true, true])]);
        assert_eq!(to_mi_lp(&same).0.num_classes, 1);
    }

    #[test]
    fn registry_keys() {
        for a in [
            BagAggregation::Arithmetic,
            BagAggregation::Geometric,
            BagAggregation::MinMax,
        ] {
            assert_eq!(a.key().parse::<BagAggregation>(), Ok(a));
        }
        assert_eq!("Min-Max".parse::<BagAggregation>(), Ok(BagAggregation::MinMax));
        assert!("transform.Median".parse::<BagAggregation>().is_err());
    }

    fn arb_dataset() -> impl Strategy<Value = MimlDataset> {
        (1usize..4, 2usize..5).prop_flat_map(|(d, q)| {
            prop::collection::vec(
                (
                    prop::collection::vec(prop::collection::vec(-1e3f64..1e3, d), 1..6),
                    prop::collection::vec(any::<bool>(), q),
                ),
                1..15,
            )
            .prop_map(|bags| dataset(&bags))
        })
    }

    proptest! {
        #[test]
        fn aggregates_stay_within_bag_range(ds in arb_dataset()) {
            for method in [BagAggregation::Arithmetic, BagAggregation::Geometric] {
                let ml = to_ml(&ds, method);
                prop_assert_eq!(ml.num_rows(), ds.num_bags());
                prop_assert_eq!(&ml.labels, ds.labels());
                for (i, bag) in ds.bags().iter().enumerate() {
                    for j in 0..bag.dim() {
                        let col: Vec<f64> = bag.instances().map(|r| r[j]).collect();
                        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
                        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                        let v = ml.row(i)[j];
                        prop_assert!(lo <= v && v <= hi);
                    }
                }
            }
        }

        #[test]
        fn transformation_counting_identities(ds in arb_dataset()) {
            let br = to_mi_br(&ds);
            let positives: usize = br.iter().map(|d| d.targets.iter().sum::<usize>()).sum();
            let card: usize = ds.labels().label_counts().iter().sum();
            prop_assert_eq!(positives, card);

            let (lp, dict) = to_mi_lp(&ds);
            prop_assert_eq!(lp.num_classes, label_stats(ds.labels()).distinct_labelsets);
            for (i, row) in ds.labels().rows().enumerate() {
                prop_assert_eq!(dict.decode(lp.targets[i]), row);
                prop_assert_eq!(dict.encode(row), Some(lp.targets[i]));
            }
        }
    }
}
