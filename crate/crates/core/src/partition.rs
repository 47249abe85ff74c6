//! Holdout and k-fold partitioning: random, labelset-powerset stratified and
//! iterative stratification.
//!
//! Every strategy is a weighted assignment of bags to parts. k-fold uses `k`
//! equal weights; holdout uses `[train_fraction, 1 - train_fraction]`. Each
//! part `j` has a desired capacity `m * w_j`, and "least filled" always means
//! "largest remaining capacity".
//!
//! All randomness comes from one [`SeededRng`] created per call.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::data::{select_bags, DataError, LabelMatrix, MimlDataset};
use crate::rng::SeededRng;

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("invalid fold count {k} for {m} bags (need 2 <= k <= m)")]
    InvalidK { k: usize, m: usize },
    #[error("invalid train fraction {fraction}: both parts must end up non-empty")]
    InvalidFraction { fraction: f64 },
    #[error("fold {fold} out of range for {k} folds")]
    IndexOutOfRange { fold: usize, k: usize },
    #[error("fold assignment covers {assigned} bags but the dataset has {m}")]
    SizeMismatch { assigned: usize, m: usize },
    #[error(transparent)]
    Data(#[from] DataError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Strategy {
    Random,
    Powerset,
    #[default]
    Iterative,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Random, Strategy::Powerset, Strategy::Iterative];

    pub fn key(self) -> &'static str {
        match self {
            Strategy::Random => "partition.Random",
            Strategy::Powerset => "partition.Powerset",
            Strategy::Iterative => "partition.Iterative",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Strategy {
    type Err = String;

    /// `partition.Iterative`, `Iterative` and `iterative` all parse.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bare = s.strip_prefix("partition.").unwrap_or(s);
        match bare.to_ascii_lowercase().as_str() {
            "random" => Ok(Strategy::Random),
            "powerset" => Ok(Strategy::Powerset),
            "iterative" => Ok(Strategy::Iterative),
            _ => Err(format!("unknown partitioning strategy '{s}'")),
        }
    }
}

/// Fold index per bag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub k: usize,
    pub assignment: Vec<usize>,
    pub seed: u64,
    pub strategy: Strategy,
}

impl FoldAssignment {
    /// Bag indices of `fold`, ascending.
    pub fn fold_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == fold)
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }
}

pub fn partition(ds: &MimlDataset, strategy: Strategy, k: usize, seed: u64) -> Result<FoldAssignment, PartitionError> {
    partition_labels(ds.labels(), strategy, k, seed)
}

/// [`partition`] on a bare label matrix.
pub fn partition_labels(
    labels: &LabelMatrix,
    strategy: Strategy,
    k: usize,
    seed: u64,
) -> Result<FoldAssignment, PartitionError> {
    let m = labels.num_rows();
    if k < 2 || k > m {
        return Err(PartitionError::InvalidK { k, m });
    }
    let weights = vec![1.0 / k as f64; k];
    let mut assignment = assign(labels, strategy, &weights, &mut SeededRng::new(seed));
    fill_empty_folds(&mut assignment, k);
    Ok(FoldAssignment {
        k,
        assignment,
        seed,
        strategy,
    })
}

/// Two-part split; returns ascending `(train, test)` index lists.
pub fn split_holdout(
    ds: &MimlDataset,
    strategy: Strategy,
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), PartitionError> {
    let invalid = PartitionError::InvalidFraction {
        fraction: train_fraction,
    };
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(invalid);
    }
    let weights = [train_fraction, 1.0 - train_fraction];
    let assignment = assign(ds.labels(), strategy, &weights, &mut SeededRng::new(seed));
    let (train, test): (Vec<usize>, Vec<usize>) = (0..assignment.len()).partition(|&i| assignment[i] == 0);
    if train.is_empty() || test.is_empty() {
        return Err(invalid);
    }
    Ok((train, test))
}

/// `(train, test)` for one fold: test holds that fold's bags, train the rest,
/// both in ascending bag order.
pub fn materialize_folds(
    ds: &MimlDataset,
    fa: &FoldAssignment,
    fold: usize,
) -> Result<(MimlDataset, MimlDataset), PartitionError> {
    if fold >= fa.k {
        return Err(PartitionError::IndexOutOfRange { fold, k: fa.k });
    }
    if fa.assignment.len() != ds.num_bags() {
        return Err(PartitionError::SizeMismatch {
            assigned: fa.assignment.len(),
            m: ds.num_bags(),
        });
    }
    let (test, train): (Vec<usize>, Vec<usize>) = (0..ds.num_bags()).partition(|&i| fa.assignment[i] == fold);
    Ok((select_bags(ds, &train)?, select_bags(ds, &test)?))
}

/// Mean absolute deviation between each fold's positive count for a label
/// and that label's ideal share `count / k`, averaged over folds and over
/// labels that occur at all. Lower is better stratified.
pub fn label_distribution_deviation(labels: &LabelMatrix, fa: &FoldAssignment) -> f64 {
    let counts = labels.label_counts();
    let mut per_fold = vec![vec![0usize; labels.num_labels()]; fa.k];
    for (i, row) in labels.rows().enumerate() {
        for (l, &v) in row.iter().enumerate() {
            per_fold[fa.assignment[i]][l] += usize::from(v);
        }
    }
    let mut total = 0.0;
    let mut n = 0usize;
    for (l, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let ideal = c as f64 / fa.k as f64;
        total += per_fold.iter().map(|f| (f[l] as f64 - ideal).abs()).sum::<f64>() / fa.k as f64;
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        total / n as f64
    }
}

fn assign(labels: &LabelMatrix, strategy: Strategy, weights: &[f64], rng: &mut SeededRng) -> Vec<usize> {
    match strategy {
        Strategy::Random => assign_random(labels.num_rows(), weights, rng),
        Strategy::Powerset => assign_powerset(labels, weights, rng),
        Strategy::Iterative => assign_iterative(labels, weights, rng),
    }
}

/// Parts with the largest remaining capacity.
fn most_room(capacity: &[f64]) -> Vec<usize> {
    let best = capacity.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (0..capacity.len()).filter(|&j| capacity[j] == best).collect()
}

/// Shuffle, then hand each bag to the part with the most room (ties to the
/// lowest index). With equal weights this is round-robin.
fn assign_random(m: usize, weights: &[f64], rng: &mut SeededRng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..m).collect();
    rng.shuffle(&mut order);
    let mut capacity: Vec<f64> = weights.iter().map(|w| w * m as f64).collect();
    let mut out = vec![0; m];
    for i in order {
        let j = most_room(&capacity)[0];
        out[i] = j;
        capacity[j] -= 1.0;
    }
    out
}

/// Group bags by labelset (first-occurrence order), shuffle each group and
/// deal it starting from the part with the most room. Each card goes to a
/// part with the most remaining room; among tied parts, the next one in
/// cyclic order from the dealing cursor wins.
fn assign_powerset(labels: &LabelMatrix, weights: &[f64], rng: &mut SeededRng) -> Vec<usize> {
    let m = labels.num_rows();
    let k = weights.len();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of: HashMap<&[bool], usize> = HashMap::new();
    for (i, row) in labels.rows().enumerate() {
        let g = *group_of.entry(row).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    let mut capacity: Vec<f64> = weights.iter().map(|w| w * m as f64).collect();
    let mut out = vec![0; m];
    for mut group in groups {
        rng.shuffle(&mut group);
        let mut cursor = most_room(&capacity)[0];
        for i in group {
            let tied = most_room(&capacity);
            let j = (0..k)
                .map(|off| (cursor + off) % k)
                .find(|j| tied.contains(j))
                .expect("at least one part has the most room");
            out[i] = j;
            capacity[j] -= 1.0;
            cursor = (j + 1) % k;
        }
    }
    out
}

/// Iterative stratification. Repeatedly take the label with the fewest
/// unassigned positive bags and place each such bag (in shuffled order) in
/// the part that most wants that label; ties go to the part with the most
/// room, then to a seeded random choice. Bags without positive labels fill
/// the parts with the most room.
fn assign_iterative(labels: &LabelMatrix, weights: &[f64], rng: &mut SeededRng) -> Vec<usize> {
    let m = labels.num_rows();
    let q = labels.num_labels();
    let mut order: Vec<usize> = (0..m).collect();
    rng.shuffle(&mut order);

    let mut remaining = labels.label_counts();
    let mut capacity: Vec<f64> = weights.iter().map(|w| w * m as f64).collect();
    let mut desired: Vec<Vec<f64>> = weights
        .iter()
        .map(|w| remaining.iter().map(|&c| c as f64 * w).collect())
        .collect();
    let mut out: Vec<Option<usize>> = vec![None; m];

    while let Some(label) = (0..q).filter(|&l| remaining[l] > 0).min_by_key(|&l| (remaining[l], l)) {
        for &i in &order {
            if out[i].is_some() || !labels.get(i, label) {
                continue;
            }
            let best = desired.iter().map(|d| d[label]).fold(f64::NEG_INFINITY, f64::max);
            let wanting: Vec<usize> = (0..weights.len()).filter(|&j| desired[j][label] == best).collect();
            let room = wanting.iter().map(|&j| capacity[j]).fold(f64::NEG_INFINITY, f64::max);
            let tied: Vec<usize> = wanting.into_iter().filter(|&j| capacity[j] == room).collect();
            let j = if tied.len() == 1 { tied[0] } else { rng.choose(&tied) };
            out[i] = Some(j);
            capacity[j] -= 1.0;
            for (l, &on) in labels.row(i).iter().enumerate() {
                if on {
                    desired[j][l] -= 1.0;
                    remaining[l] -= 1;
                }
            }
        }
    }

    for &i in &order {
        if out[i].is_none() {
            let tied = most_room(&capacity);
            let j = if tied.len() == 1 { tied[0] } else { rng.choose(&tied) };
            out[i] = Some(j);
            capacity[j] -= 1.0;
        }
    }
    out.into_iter().map(|o| o.expect("every bag is placed")).collect()
}

/// Moves bags out of the largest folds until no fold is empty (possible
/// only when m >= k).
fn fill_empty_folds(assignment: &mut [usize], k: usize) {
    loop {
        let mut sizes = vec![0usize; k];
        for &f in assignment.iter() {
            sizes[f] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let donor = (0..k).max_by_key(|&j| (sizes[j], std::cmp::Reverse(j))).unwrap();
        if sizes[donor] < 2 {
            return;
        }
        let moved = (0..assignment.len()).rev().find(|&i| assignment[i] == donor).unwrap();
        assignment[moved] = empty;
    }
}
