//! Descriptive statistics of a MIML dataset.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::data::{LabelMatrix, MimlDataset};

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetStats {
    pub num_bags: usize,
    pub num_labels: usize,
    pub num_attributes: usize,
    pub bag_size_min: usize,
    pub bag_size_max: usize,
    pub bag_size_mean: f64,
    /// Mean number of positive labels per bag.
    pub cardinality: f64,
    /// `cardinality / num_labels`.
    pub density: f64,
    pub distinct_labelsets: usize,
    pub label_frequencies: Vec<usize>,
    /// `cooccurrence[a][b]`: bags where labels `a` and `b` are both positive.
    pub cooccurrence: Vec<Vec<usize>>,
    /// Imbalance ratio per label; `None` for labels that never occur.
    pub irlbl: Vec<Option<f64>>,
    /// Mean of the defined `irlbl` entries; `None` when no label occurs.
    pub mean_ir: Option<f64>,
    pub label_names: Vec<String>,
}

pub fn compute_stats(ds: &MimlDataset) -> DatasetStats {
    let sizes: Vec<usize> = ds.bags().iter().map(|b| b.len()).collect();
    let label_stats = label_stats(ds.labels());
    DatasetStats {
        num_bags: ds.num_bags(),
        num_labels: ds.num_labels(),
        num_attributes: ds.dim(),
        bag_size_min: sizes.iter().copied().min().unwrap_or(0),
        bag_size_max: sizes.iter().copied().max().unwrap_or(0),
        bag_size_mean: sizes.iter().sum::<usize>() as f64 / sizes.len() as f64,
        ..label_stats
    }
}

/// The label-only part of [`compute_stats`]; bag-size fields are zero.
pub fn label_stats(labels: &LabelMatrix) -> DatasetStats {
    let m = labels.num_rows();
    let q = labels.num_labels();
    let mut cooccurrence = vec![vec![0usize; q]; q];
    let mut labelsets = HashSet::new();
    let mut positives = 0usize;
    for row in labels.rows() {
        labelsets.insert(row);
        let on: Vec<usize> = (0..q).filter(|&l| row[l]).collect();
        positives += on.len();
        for &a in &on {
            for &b in &on {
                cooccurrence[a][b] += 1;
            }
        }
    }
    let label_frequencies: Vec<usize> = (0..q).map(|l| cooccurrence[l][l]).collect();
    let max_freq = label_frequencies.iter().copied().max().unwrap_or(0);
    let irlbl: Vec<Option<f64>> = label_frequencies
        .iter()
        .map(|&f| (f > 0).then(|| max_freq as f64 / f as f64))
        .collect();
    let defined: Vec<f64> = irlbl.iter().flatten().copied().collect();
    let mean_ir = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
    let cardinality = positives as f64 / m as f64;
    DatasetStats {
        num_bags: m,
        num_labels: q,
        num_attributes: 0,
        bag_size_min: 0,
        bag_size_max: 0,
        bag_size_mean: 0.0,
        cardinality,
        density: cardinality / q as f64,
        distinct_labelsets: labelsets.len(),
        label_frequencies,
        cooccurrence,
        irlbl,
        mean_ir,
        label_names: labels.names().to_vec(),
    }
}

impl DatasetStats {
    /// Flat `key=value` lines. Scalar keys come first in a fixed order, then
    /// per-label keys as `key[label]` and co-occurrence as
    /// `cooccurrence[a][b]`. Undefined values print as `NA`.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let na = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| format!("{x}"));
        let _ = writeln!(out, "num_bags={}", self.num_bags);
        let _ = writeln!(out, "num_labels={}", self.num_labels);
        let _ = writeln!(out, "num_attributes={}", self.num_attributes);
        let _ = writeln!(out, "bag_size_min={}", self.bag_size_min);
        let _ = writeln!(out, "bag_size_max={}", self.bag_size_max);
        let _ = writeln!(out, "bag_size_mean={}", self.bag_size_mean);
        let _ = writeln!(out, "cardinality={}", self.cardinality);
        let _ = writeln!(out, "density={}", self.density);
        let _ = writeln!(out, "distinct_labelsets={}", self.distinct_labelsets);
        let _ = writeln!(out, "mean_ir={}", na(self.mean_ir));
        for (l, name) in self.label_names.iter().enumerate() {
            let _ = writeln!(out, "label_frequency[{name}]={}", self.label_frequencies[l]);
        }
        for (l, name) in self.label_names.iter().enumerate() {
            let _ = writeln!(out, "irlbl[{name}]={}", na(self.irlbl[l]));
        }
        for (a, na_) in self.label_names.iter().enumerate() {
            for (b, nb) in self.label_names.iter().enumerate() {
                let _ = writeln!(out, "cooccurrence[{na_}][{nb}]={}", self.cooccurrence[a][b]);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::fixtures::dataset;

    fn labels(rows: &[&[u8]]) -> LabelMatrix {
        let q = rows[0].len();
        let rows: Vec<Vec<bool>> = rows.iter().map(|r| r.iter().map(|&v| v == 1).collect()).collect();
        LabelMatrix::new((0..q).map(|l| format!("l{l}")).collect(), &rows).unwrap()
    }

    #[test]
    fn two_by_two_hand_count() {
        let s = label_stats(&labels(&[&[1, 0], &[1, 1]]));
        assert_eq!(s.cardinality, 1.5);
        assert_eq!(s.density, 0.75);
        assert_eq!(s.distinct_labelsets, 2);
        assert_eq!(s.label_frequencies, vec![2, 1]);
        assert_eq!(s.irlbl, vec![Some(1.0), Some(2.0)]);
        assert_eq!(s.mean_ir, Some(1.5));
    }

    #[test]
    fn cooccurrence_hand_count() {
        let s = label_stats(&labels(&[&[1, 1], &[1, 0]]));
        assert_eq!(s.cooccurrence, vec![vec![2, 1], vec![1, 1]]);
    }

    #[test]
    fn all_ones() {
        let s = label_stats(&labels(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]]));
        assert_eq!(s.cardinality, 3.0);
        assert_eq!(s.density, 1.0);
        assert_eq!(s.distinct_labelsets, 1);
        assert_eq!(s.mean_ir, Some(1.0));
    }

    #[test]
    fn absent_label_is_excluded_from_mean_ir() {
        let s = label_stats(&labels(&[&[1, 0, 0], &[1, 1, 0]]));
        assert_eq!(s.irlbl, vec![Some(1.0), Some(2.0), None]);
        assert_eq!(s.mean_ir, Some(1.5));
        assert!(s.to_key_value().contains("irlbl[l2]=NA\n"));
        assert_eq!(label_stats(&labels(&[&[0, 0]])).mean_ir, None);
    }

    #[test]
    fn bag_sizes() {
        let ds = dataset(&[
            (vec![vec![0.0], vec![1.0], vec![2.0]], vec![true, false]),
            (vec![vec![0.0]], vec![false, true]),
        ]);
        let s = compute_stats(&ds);
        assert_eq!((s.bag_size_min, s.bag_size_max, s.bag_size_mean), (1, 3, 2.0));
        assert_eq!(s.num_attributes, 1);
        let kv = s.to_key_value();
        assert!(kv.starts_with("num_bags=2\nnum_labels=2\nnum_attributes=1\n"));
    }
}
