//! Random fixtures and brute-force reference implementations shared by the
//! integration and acceptance tests. Nothing here calls the code under test
//! except to build inputs and, for the lazy learners, to get bag distances.

#![allow(dead_code)]

use std::collections::BTreeSet;

use miml_core::data::{AttributeSchema, Bag, LabelMatrix, MimlDataset};
use miml_core::distance::{bag_distance, AttributeRanges, BagDistanceKind, Hausdorff};
use nalgebra::DMatrix;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Limits for [`random_dataset`].
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub min_bags: usize,
    pub max_bags: usize,
    pub max_dim: usize,
    pub max_labels: usize,
    pub max_bag_size: usize,
    /// Small integer values, so distances tie often.
    pub coarse: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Self {
            min_bags: 1,
            max_bags: 20,
            max_dim: 5,
            max_labels: 4,
            max_bag_size: 6,
            coarse: false,
        }
    }
}

const NAME_CHARS: &[char] = &['a', 'b', 'Z', '7', '_', '-', ' ', ',', '\'', '"', '&', '<', '%', '.'];

pub fn random_name(rng: &mut ChaCha8Rng, prefix: &str) -> String {
    let n = rng.random_range(0..5);
    let tail: String = (0..n).map(|_| *NAME_CHARS.choose(rng).unwrap()).collect();
    format!("{prefix}:{tail}")
}

pub fn random_value(rng: &mut ChaCha8Rng, coarse: bool) -> f64 {
    if coarse {
        f64::from(rng.random_range(0..3u8))
    } else {
        match rng.random_range(0..10) {
            0 => 0.0,
            1 => rng.random_range(-1e6..1e6),
            2 => rng.random_range(-1e-6..1e-6),
            _ => rng.random_range(-10.0..10.0),
        }
    }
}

pub fn random_rows(rng: &mut ChaCha8Rng, dim: usize, max_size: usize, coarse: bool) -> Vec<Vec<f64>> {
    let n = rng.random_range(1..=max_size);
    (0..n)
        .map(|_| (0..dim).map(|_| random_value(rng, coarse)).collect())
        .collect()
}

pub fn random_labels(rng: &mut ChaCha8Rng, m: usize, q: usize) -> Vec<Vec<bool>> {
    let p: Vec<f64> = (0..q).map(|_| rng.random_range(0.1..0.7)).collect();
    (0..m)
        .map(|_| (0..q).map(|l| rng.random_bool(p[l])).collect())
        .collect()
}

pub fn random_dataset(rng: &mut ChaCha8Rng, shape: Shape) -> MimlDataset {
    let m = rng.random_range(shape.min_bags..=shape.max_bags);
    let d = rng.random_range(1..=shape.max_dim);
    let q = rng.random_range(2..=shape.max_labels.max(2));
    let schema = AttributeSchema::new((0..d).map(|j| random_name(rng, &format!("f{j}"))).collect()).unwrap();
    let bags = (0..m)
        .map(|i| {
            let rows = random_rows(rng, d, shape.max_bag_size, shape.coarse);
            Bag::from_rows(random_name(rng, &format!("b{i}")), &rows).unwrap()
        })
        .collect();
    let names = (0..q).map(|l| random_name(rng, &format!("l{l}"))).collect();
    let labels = LabelMatrix::new(names, &random_labels(rng, m, q)).unwrap();
    let relation = random_name(rng, "rel");
    MimlDataset::with_attribute_names(relation, "bag id", "bag", schema, bags, labels).unwrap()
}

pub fn random_kind(rng: &mut ChaCha8Rng) -> BagDistanceKind {
    let variant = Hausdorff::ALL[rng.random_range(0..3)];
    BagDistanceKind {
        variant,
        normalize: rng.random_bool(0.3),
    }
}

// ---- distances -------------------------------------------------------------

fn euclidean(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
}

/// Point-to-set distances recomputed from scratch for every point.
pub fn brute_hausdorff(variant: Hausdorff, a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let to_set = |x: &Vec<f64>, set: &[Vec<f64>]| {
        let mut best = f64::INFINITY;
        for y in set {
            let d = euclidean(x, y);
            if d < best {
                best = d;
            }
        }
        best
    };
    match variant {
        Hausdorff::Maximal => {
            let mut h = 0.0f64;
            for x in a {
                h = h.max(to_set(x, b));
            }
            for y in b {
                h = h.max(to_set(y, a));
            }
            h
        }
        Hausdorff::Minimal => {
            let mut h = f64::INFINITY;
            for x in a {
                for y in b {
                    h = h.min(euclidean(x, y));
                }
            }
            h
        }
        Hausdorff::Average => {
            let mut total = 0.0;
            for x in a {
                total += to_set(x, b);
            }
            for y in b {
                total += to_set(y, a);
            }
            total / (a.len() + b.len()) as f64
        }
    }
}

pub fn rows_of(bag: &Bag) -> Vec<Vec<f64>> {
    bag.instances().map(<[f64]>::to_vec).collect()
}

// ---- lazy learners ---------------------------------------------------------

/// Distances from `query` to every training bag, with normalization ranges
/// taken from the training bags.
pub fn distances_to(train: &MimlDataset, kind: BagDistanceKind, query: &Bag) -> Vec<f64> {
    let ranges = AttributeRanges::from_bags(train.bags()).unwrap();
    train
        .bags()
        .iter()
        .map(|b| bag_distance(kind, query, b, Some(&ranges)).unwrap())
        .collect()
}

/// All indices sorted by distance, ties by index, `skip` left out.
pub fn ranking(dists: &[f64], skip: Option<usize>) -> Vec<usize> {
    let mut pairs: Vec<(f64, usize)> = dists
        .iter()
        .copied()
        .enumerate()
        .filter(|&(i, _)| Some(i) != skip)
        .map(|(i, d)| (d, i))
        .collect();
    pairs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pairs.into_iter().map(|(_, i)| i).collect()
}

fn positives(train: &MimlDataset, members: &[usize], l: usize) -> usize {
    members.iter().filter(|&&j| train.labels().get(j, l)).count()
}

/// Per-label vote share of the `k` nearest training bags; positive at 0.5.
pub fn reference_brknn(train: &MimlDataset, kind: BagDistanceKind, k: usize, query: &Bag) -> (Vec<bool>, Vec<f64>) {
    let d = distances_to(train, kind, query);
    let nn: Vec<usize> = ranking(&d, None).into_iter().take(k).collect();
    let conf: Vec<f64> = (0..train.num_labels())
        .map(|l| positives(train, &nn, l) as f64 / k as f64)
        .collect();
    (conf.iter().map(|&c| c >= 0.5).collect(), conf)
}

/// Maximum a posteriori rule with Laplace smoothing `s` and leave-one-out
/// neighbour counts on the training set.
pub fn reference_mapknn(
    train: &MimlDataset,
    kind: BagDistanceKind,
    k: usize,
    s: f64,
    query: &Bag,
) -> (Vec<bool>, Vec<f64>) {
    let m = train.num_bags();
    let q = train.num_labels();
    let loo: Vec<Vec<usize>> = (0..m)
        .map(|i| {
            let d = distances_to(train, kind, &train.bags()[i]);
            let nn: Vec<usize> = ranking(&d, Some(i)).into_iter().take(k).collect();
            (0..q).map(|l| positives(train, &nn, l)).collect()
        })
        .collect();
    let d = distances_to(train, kind, query);
    let nn: Vec<usize> = ranking(&d, None).into_iter().take(k).collect();
    let conf: Vec<f64> = (0..q)
        .map(|l| {
            let j = positives(train, &nn, l);
            let pos: Vec<usize> = (0..m).filter(|&i| train.labels().get(i, l)).collect();
            let neg: Vec<usize> = (0..m).filter(|&i| !train.labels().get(i, l)).collect();
            let p1 = (s + pos.len() as f64) / (2.0 * s + m as f64);
            let p0 = 1.0 - p1;
            let hits = |set: &[usize]| set.iter().filter(|&&i| loo[i][l] == j).count() as f64;
            let denom = |set: &[usize]| s * (k + 1) as f64 + set.len() as f64;
            let a = p1 * ((s + hits(&pos)) / denom(&pos));
            let b = p0 * ((s + hits(&neg)) / denom(&neg));
            a / (a + b)
        })
        .collect();
    (conf.iter().map(|&c| c >= 0.5).collect(), conf)
}

/// Confidences of the citation-based linear model, with the weights solved
/// densely by SVD on the ridge-augmented system.
pub fn reference_mimlknn(
    train: &MimlDataset,
    kind: BagDistanceKind,
    r: usize,
    c: usize,
    ridge: f64,
    queries: &[Bag],
) -> Vec<Vec<f64>> {
    let m = train.num_bags();
    let q = train.num_labels();
    let rankings: Vec<(Vec<f64>, Vec<usize>)> = (0..m)
        .map(|i| {
            let d = distances_to(train, kind, &train.bags()[i]);
            let order = ranking(&d, Some(i));
            (d, order)
        })
        .collect();
    let radius: Vec<f64> = rankings.iter().map(|(d, order)| d[order[c - 1]]).collect();
    let counts = |members: &BTreeSet<usize>| -> Vec<f64> {
        (0..q)
            .map(|l| members.iter().filter(|&&j| train.labels().get(j, l)).count() as f64)
            .collect()
    };

    let mut a = DMatrix::<f64>::zeros(m + q, q);
    let mut t = DMatrix::<f64>::zeros(m + q, q);
    for i in 0..m {
        let mut members: BTreeSet<usize> = rankings[i].1[..r].iter().copied().collect();
        for (j, (_, order)) in rankings.iter().enumerate() {
            if order[..c].contains(&i) {
                members.insert(j);
            }
        }
        for (l, v) in counts(&members).into_iter().enumerate() {
            a[(i, l)] = v;
            t[(i, l)] = if train.labels().get(i, l) { 1.0 } else { -1.0 };
        }
    }
    for l in 0..q {
        a[(m + l, l)] = ridge.sqrt();
    }
    let w = a.svd(true, true).solve(&t, 1e-300).unwrap();

    queries
        .iter()
        .map(|bag| {
            let d = distances_to(train, kind, bag);
            let mut members: BTreeSet<usize> = ranking(&d, None)[..r].iter().copied().collect();
            members.extend((0..m).filter(|&j| d[j] < radius[j]));
            let v = counts(&members);
            (0..q).map(|l| (0..q).map(|k| w[(k, l)] * v[k]).sum()).collect()
        })
        .collect()
}

// ---- metrics ---------------------------------------------------------------

/// Mid-ranks by decreasing score: sort, then give each tie group the mean
/// of the positions it spans.
pub fn sorted_mid_ranks(scores: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());
    let mut ranks = vec![0.0; scores.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && scores[order[end + 1]] == scores[order[start]] {
            end += 1;
        }
        let mid = (start + 1 + end + 1) as f64 / 2.0;
        for &i in &order[start..=end] {
            ranks[i] = mid;
        }
        start = end + 1;
    }
    ranks
}

fn set(v: &[bool]) -> BTreeSet<usize> {
    (0..v.len()).filter(|&i| v[i]).collect()
}

/// Set ratio with the empty-denominator conventions: 1 when both sets are
/// empty, 0 otherwise.
fn set_ratio(num: usize, den: usize, both_empty: bool) -> f64 {
    if den == 0 {
        if both_empty {
            1.0
        } else {
            0.0
        }
    } else {
        num as f64 / den as f64
    }
}

/// Every measure in report order, macro measures with per-label values.
pub fn reference_measures(truth: &[Vec<bool>], bip: &[Vec<bool>], conf: &[Vec<f64>]) -> Vec<(f64, Option<Vec<f64>>)> {
    let n = truth.len();
    let q = truth[0].len();
    let mean = |f: &dyn Fn(usize) -> f64| (0..n).map(f).sum::<f64>() / n as f64;

    let ex = |i: usize| {
        let y = set(&truth[i]);
        let z = set(&bip[i]);
        let inter = y.intersection(&z).count();
        let union = y.union(&z).count();
        (y.len(), z.len(), inter, union)
    };
    let hamming = mean(&|i| ex(i).3.saturating_sub(ex(i).2) as f64 / q as f64);
    let subset = mean(&|i| f64::from(u8::from(truth[i] == bip[i])));
    let ex_p = mean(&|i| {
        let (y, z, int, _) = ex(i);
        set_ratio(int, z, y == 0 && z == 0)
    });
    let ex_r = mean(&|i| {
        let (y, z, int, _) = ex(i);
        set_ratio(int, y, y == 0 && z == 0)
    });
    let ex_f = mean(&|i| {
        let (y, z, int, _) = ex(i);
        set_ratio(2 * int, y + z, y == 0 && z == 0)
    });
    let ex_a = mean(&|i| {
        let (_, _, int, uni) = ex(i);
        set_ratio(int, uni, true)
    });

    let label_counts = |l: usize| {
        let tp = (0..n).filter(|&i| truth[i][l] && bip[i][l]).count();
        let fp = (0..n).filter(|&i| !truth[i][l] && bip[i][l]).count();
        let fneg = (0..n).filter(|&i| truth[i][l] && !bip[i][l]).count();
        (tp, fp, fneg)
    };
    let scores = |(tp, fp, fneg): (usize, usize, usize)| {
        let empty = tp + fp + fneg == 0;
        [
            set_ratio(tp, tp + fp, empty),
            set_ratio(tp, tp + fneg, empty),
            set_ratio(2 * tp, 2 * tp + fp + fneg, empty),
        ]
    };
    let totals = (0..q)
        .map(label_counts)
        .fold((0, 0, 0), |a, c| (a.0 + c.0, a.1 + c.1, a.2 + c.2));
    let micro = scores(totals);
    let per: Vec<[f64; 3]> = (0..q).map(|l| scores(label_counts(l))).collect();
    let macro_ = |s: usize| {
        let v: Vec<f64> = per.iter().map(|p| p[s]).collect();
        (v.iter().sum::<f64>() / q as f64, Some(v))
    };

    let mut one_error = Vec::new();
    let mut coverage = Vec::new();
    let mut ranking_loss = Vec::new();
    let mut avg_prec = Vec::new();
    for i in 0..n {
        let y = set(&truth[i]);
        if y.is_empty() {
            continue;
        }
        let c = &conf[i];
        let rank = sorted_mid_ranks(c);
        let best = rank.iter().copied().fold(f64::INFINITY, f64::min);
        let top: Vec<usize> = (0..q).filter(|&l| rank[l] == best).collect();
        one_error.push(top.iter().filter(|l| !y.contains(l)).count() as f64 / top.len() as f64);
        coverage.push(y.iter().map(|&l| rank[l]).fold(0.0, f64::max) - 1.0);
        let rel: Vec<usize> = y.iter().copied().collect();
        let rel_rank = sorted_mid_ranks(&rel.iter().map(|&l| c[l]).collect::<Vec<_>>());
        avg_prec.push(rel.iter().enumerate().map(|(j, &l)| rel_rank[j] / rank[l]).sum::<f64>() / rel.len() as f64);
        let irr: Vec<usize> = (0..q).filter(|l| !y.contains(l)).collect();
        if !irr.is_empty() {
            let mut bad = 0.0;
            for &a in &rel {
                for &b in &irr {
                    bad += match c[a].partial_cmp(&c[b]).unwrap() {
                        std::cmp::Ordering::Less => 1.0,
                        std::cmp::Ordering::Equal => 0.5,
                        std::cmp::Ordering::Greater => 0.0,
                    };
                }
            }
            ranking_loss.push(bad / (rel.len() * irr.len()) as f64);
        }
    }
    let avg = |v: &[f64], empty: f64| {
        if v.is_empty() {
            empty
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        }
    };

    vec![
        (hamming, None),
        (subset, None),
        (ex_p, None),
        (ex_r, None),
        (ex_f, None),
        (ex_a, None),
        (micro[0], None),
        (micro[1], None),
        (micro[2], None),
        macro_(0),
        macro_(1),
        macro_(2),
        (avg(&one_error, 0.0), None),
        (avg(&coverage, 0.0), None),
        (avg(&ranking_loss, 0.0), None),
        (avg(&avg_prec, 1.0), None),
    ]
}

// ---- partitioning ----------------------------------------------------------

/// Mean over labels that occur of the mean absolute gap between a fold's
/// positive count and the label's even share.
pub fn fold_frequency_deviation(labels: &[Vec<bool>], assignment: &[usize], k: usize) -> f64 {
    let q = labels[0].len();
    let mut per_label = Vec::new();
    for l in 0..q {
        let total = labels.iter().filter(|r| r[l]).count();
        if total == 0 {
            continue;
        }
        let share = total as f64 / k as f64;
        let gap: f64 = (0..k)
            .map(|f| {
                let in_fold = (0..labels.len())
                    .filter(|&i| assignment[i] == f && labels[i][l])
                    .count();
                (in_fold as f64 - share).abs()
            })
            .sum();
        per_label.push(gap / k as f64);
    }
    if per_label.is_empty() {
        0.0
    } else {
        per_label.iter().sum::<f64>() / per_label.len() as f64
    }
}

/// Rows of an imbalanced label matrix: one common label and several rare
/// ones.
pub fn imbalanced_labels(rng: &mut ChaCha8Rng, m: usize) -> Vec<Vec<bool>> {
    let p = [0.6, 0.15, 0.08, 0.05, 0.03];
    (0..m)
        .map(|_| p.iter().map(|&pl| rng.random_bool(pl)).collect())
        .collect()
}
