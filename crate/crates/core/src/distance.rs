//! Hausdorff-family distances between bags.
//!
//! With `e(x, B) = min_{y in B} ||x - y||` (Euclidean):
//!
//! * maximal: `max(max_{x in A} e(x, B), max_{y in B} e(y, A))`
//! * minimal: `min_{x in A, y in B} ||x - y||`
//! * average: `(sum_{x in A} e(x, B) + sum_{y in B} e(y, A)) / (|A| + |B|)`
//!
//! Optional min-max normalization rescales every attribute to `[0, 1]` using
//! ranges taken from a reference set of bags (the training set).

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::data::Bag;
use crate::par::{self, Execution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistanceError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("normalization requested but no attribute ranges were supplied")]
    MissingRanges,
    #[error("unknown distance '{0}'")]
    UnknownDistance(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hausdorff {
    Average,
    Minimal,
    Maximal,
}

impl Hausdorff {
    pub const ALL: [Hausdorff; 3] = [Hausdorff::Average, Hausdorff::Minimal, Hausdorff::Maximal];

    /// Registry key used in configuration files.
    pub fn key(self) -> &'static str {
        match self {
            Hausdorff::Average => "distance.AverageHausdorff",
            Hausdorff::Minimal => "distance.MinimalHausdorff",
            Hausdorff::Maximal => "distance.MaximalHausdorff",
        }
    }
}

impl fmt::Display for Hausdorff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Hausdorff {
    type Err = DistanceError;

    /// Accepts `distance.AverageHausdorff`, the fully qualified
    /// `miml.core.distance.AverageHausdorff`, or the bare `AverageHausdorff`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bare = s.rsplit('.').next().unwrap_or(s);
        let prefix = &s[..s.len() - bare.len()];
        if !matches!(prefix, "" | "distance." | "miml.core.distance." | "core.distance.") {
            return Err(DistanceError::UnknownDistance(s.to_string()));
        }
        match bare {
            "AverageHausdorff" => Ok(Hausdorff::Average),
            "MinimalHausdorff" => Ok(Hausdorff::Minimal),
            "MaximalHausdorff" => Ok(Hausdorff::Maximal),
            _ => Err(DistanceError::UnknownDistance(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BagDistanceKind {
    pub variant: Hausdorff,
    pub normalize: bool,
}

impl BagDistanceKind {
    pub fn new(variant: Hausdorff) -> Self {
        Self {
            variant,
            normalize: false,
        }
    }

    pub fn normalized(variant: Hausdorff) -> Self {
        Self {
            variant,
            normalize: true,
        }
    }
}

impl Default for BagDistanceKind {
    fn default() -> Self {
        Self::new(Hausdorff::Average)
    }
}

/// Per-attribute `(min, max)` ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeRanges {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl AttributeRanges {
    /// Ranges over every instance of every bag. `bags` must be non-empty and
    /// share one dimension.
    pub fn from_bags<'a>(bags: impl IntoIterator<Item = &'a Bag>) -> Result<Self, DistanceError> {
        let mut iter = bags.into_iter();
        let first = iter.next().ok_or(DistanceError::MissingRanges)?;
        let d = first.dim();
        let mut mins = vec![f64::INFINITY; d];
        let mut maxs = vec![f64::NEG_INFINITY; d];
        for bag in std::iter::once(first).chain(iter) {
            if bag.dim() != d {
                return Err(DistanceError::DimensionMismatch {
                    left: d,
                    right: bag.dim(),
                });
            }
            for inst in bag.instances() {
                for (j, &v) in inst.iter().enumerate() {
                    mins[j] = mins[j].min(v);
                    maxs[j] = maxs[j].max(v);
                }
            }
        }
        Ok(Self { mins, maxs })
    }

    pub fn dim(&self) -> usize {
        self.mins.len()
    }

    /// `(x - min) / (max - min)`; attributes with zero width map to 0.
    pub fn normalize_value(&self, j: usize, x: f64) -> f64 {
        let width = self.maxs[j] - self.mins[j];
        if width > 0.0 {
            (x - self.mins[j]) / width
        } else {
            0.0
        }
    }

    pub fn normalize_bag(&self, bag: &Bag) -> Bag {
        let d = bag.dim();
        let values = bag
            .values()
            .iter()
            .enumerate()
            .map(|(i, &x)| self.normalize_value(i % d, x))
            .collect();
        Bag::from_parts(bag.id().to_string(), d, values)
    }
}

fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Hausdorff distance between bags already in the space the metric works in
/// (normalized when required). Dimensions must match.
pub(crate) fn hausdorff_raw(variant: Hausdorff, a: &Bag, b: &Bag) -> f64 {
    debug_assert_eq!(a.dim(), b.dim());
    // Minima are taken on squared distances; sqrt is monotone and correctly
    // rounded, so sqrt(min s) == min sqrt(s) exactly.
    let mut col_min = vec![f64::INFINITY; b.len()];
    let mut max_row = 0.0f64;
    let mut sum_row = 0.0f64;
    let mut min_all = f64::INFINITY;
    for x in a.instances() {
        let mut row_min = f64::INFINITY;
        for (cm, y) in col_min.iter_mut().zip(b.instances()) {
            let s = squared_euclidean(x, y);
            row_min = row_min.min(s);
            *cm = cm.min(s);
        }
        min_all = min_all.min(row_min);
        let e = row_min.sqrt();
        max_row = max_row.max(e);
        sum_row += e;
    }
    match variant {
        Hausdorff::Minimal => min_all.sqrt(),
        Hausdorff::Maximal => {
            let max_col = col_min.iter().fold(0.0f64, |m, &s| m.max(s.sqrt()));
            max_row.max(max_col)
        }
        Hausdorff::Average => {
            let sum_col: f64 = col_min.iter().map(|s| s.sqrt()).sum();
            (sum_row + sum_col) / (a.len() + b.len()) as f64
        }
    }
}

/// Distance between two bags. `ranges` is required when `kind.normalize`
/// is set and ignored otherwise.
pub fn bag_distance(
    kind: BagDistanceKind,
    a: &Bag,
    b: &Bag,
    ranges: Option<&AttributeRanges>,
) -> Result<f64, DistanceError> {
    if a.dim() != b.dim() {
        return Err(DistanceError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    if !kind.normalize {
        return Ok(hausdorff_raw(kind.variant, a, b));
    }
    let ranges = ranges.ok_or(DistanceError::MissingRanges)?;
    if ranges.dim() != a.dim() {
        return Err(DistanceError::DimensionMismatch {
            left: a.dim(),
            right: ranges.dim(),
        });
    }
    Ok(hausdorff_raw(
        kind.variant,
        &ranges.normalize_bag(a),
        &ranges.normalize_bag(b),
    ))
}

/// A distance kind fitted to a reference set: holds normalization ranges
/// when the kind asks for them.
#[derive(Debug, Clone, PartialEq)]
pub struct BagMetric {
    kind: BagDistanceKind,
    ranges: Option<AttributeRanges>,
}

impl BagMetric {
    pub fn fit(kind: BagDistanceKind, reference: &[Bag]) -> Result<Self, DistanceError> {
        let ranges = if kind.normalize {
            Some(AttributeRanges::from_bags(reference)?)
        } else {
            None
        };
        Ok(Self { kind, ranges })
    }

    pub fn kind(&self) -> BagDistanceKind {
        self.kind
    }

    /// Maps a bag into the metric's working space.
    pub fn prepare(&self, bag: &Bag) -> Bag {
        match &self.ranges {
            Some(r) => r.normalize_bag(bag),
            None => bag.clone(),
        }
    }

    /// Distance between two bags returned by [`BagMetric::prepare`].
    pub fn between_prepared(&self, a: &Bag, b: &Bag) -> f64 {
        hausdorff_raw(self.kind.variant, a, b)
    }
}

/// Symmetric `n × n` matrix of bag distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    /// Upper triangle computed once per pair, mirrored into the lower.
    pub(crate) fn build<F>(n: usize, exec: Execution, dist: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync + Send,
    {
        let upper = par::map_indexed(exec, n, |i| ((i + 1)..n).map(|j| dist(i, j)).collect::<Vec<_>>());
        let mut values = vec![0.0; n * n];
        for (i, row) in upper.into_iter().enumerate() {
            for (off, d) in row.into_iter().enumerate() {
                let j = i + 1 + off;
                values[i * n + j] = d;
                values[j * n + i] = d;
            }
        }
        Self { n, values }
    }
}

/// All pairwise distances. With normalization, ranges come from `bags`.
pub fn pairwise_distances(kind: BagDistanceKind, bags: &[Bag]) -> Result<DistanceMatrix, DistanceError> {
    pairwise_distances_with(kind, bags, Execution::default())
}

pub fn pairwise_distances_with(
    kind: BagDistanceKind,
    bags: &[Bag],
    exec: Execution,
) -> Result<DistanceMatrix, DistanceError> {
    if let Some(first) = bags.first() {
        if let Some(b) = bags.iter().find(|b| b.dim() != first.dim()) {
            return Err(DistanceError::DimensionMismatch {
                left: first.dim(),
                right: b.dim(),
            });
        }
    }
    if bags.is_empty() {
        return Ok(DistanceMatrix {
            n: 0,
            values: Vec::new(),
        });
    }
    let metric = BagMetric::fit(kind, bags)?;
    let prepared: Vec<Bag> = bags.iter().map(|b| metric.prepare(b)).collect();
    Ok(DistanceMatrix::build(prepared.len(), exec, |i, j| {
        metric.between_prepared(&prepared[i], &prepared[j])
    }))
}
