//! Multi-label performance measures over ground truth and predictions.
//!
//! Bipartition measures use `Prediction::bipartition`; ranking measures use
//! `Prediction::confidences`, ranking labels by decreasing confidence with
//! tied labels sharing the mean of their ranks.
//!
//! Zero division: a precision, recall, F-measure or Jaccard ratio whose
//! denominator is empty scores 0, except when nothing was relevant and
//! nothing was predicted, which scores 1. Ranking measures skip examples on
//! which they are undefined (no relevant label; for Ranking Loss also no
//! irrelevant label); with no eligible example the losses are 0 and Average
//! Precision is 1.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::classify::Prediction;
use crate::data::LabelMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("unknown measure '{0}'")]
    UnknownMeasure(String),
    #[error("{what}: expected {expected}, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    HammingLoss,
    SubsetAccuracy,
    ExamplePrecision,
    ExampleRecall,
    ExampleFMeasure,
    ExampleAccuracy,
    MicroPrecision,
    MicroRecall,
    MicroFMeasure,
    MacroPrecision,
    MacroRecall,
    MacroFMeasure,
    OneError,
    Coverage,
    RankingLoss,
    AveragePrecision,
}

impl Measure {
    /// Every measure, in report column order.
    pub const ALL: [Measure; 16] = [
        Measure::HammingLoss,
        Measure::SubsetAccuracy,
        Measure::ExamplePrecision,
        Measure::ExampleRecall,
        Measure::ExampleFMeasure,
        Measure::ExampleAccuracy,
        Measure::MicroPrecision,
        Measure::MicroRecall,
        Measure::MicroFMeasure,
        Measure::MacroPrecision,
        Measure::MacroRecall,
        Measure::MacroFMeasure,
        Measure::OneError,
        Measure::Coverage,
        Measure::RankingLoss,
        Measure::AveragePrecision,
    ];

    /// Display name; also the name used in configuration files.
    pub fn name(self) -> &'static str {
        match self {
            Measure::HammingLoss => "Hamming Loss",
            Measure::SubsetAccuracy => "Subset Accuracy",
            Measure::ExamplePrecision => "Example-Based Precision",
            Measure::ExampleRecall => "Example-Based Recall",
            Measure::ExampleFMeasure => "Example-Based F Measure",
            Measure::ExampleAccuracy => "Example-Based Accuracy",
            Measure::MicroPrecision => "Micro-averaged Precision",
            Measure::MicroRecall => "Micro-averaged Recall",
            Measure::MicroFMeasure => "Micro-averaged F-Measure",
            Measure::MacroPrecision => "Macro-averaged Precision",
            Measure::MacroRecall => "Macro-averaged Recall",
            Measure::MacroFMeasure => "Macro-averaged F-Measure",
            Measure::OneError => "One-error",
            Measure::Coverage => "Coverage",
            Measure::RankingLoss => "Ranking Loss",
            Measure::AveragePrecision => "Average Precision",
        }
    }

    /// Macro measures have a value per label.
    pub fn is_macro(self) -> bool {
        matches!(
            self,
            Measure::MacroPrecision | Measure::MacroRecall | Measure::MacroFMeasure
        )
    }

    pub fn uses_confidences(self) -> bool {
        matches!(
            self,
            Measure::OneError | Measure::Coverage | Measure::RankingLoss | Measure::AveragePrecision
        )
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = MetricsError;

    /// Exact display names, ignoring case and surrounding whitespace.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        Measure::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(t))
            .ok_or_else(|| MetricsError::UnknownMeasure(s.to_string()))
    }
}

pub fn parse_measures<S: AsRef<str>>(names: &[S]) -> Result<Vec<Measure>, MetricsError> {
    names.iter().map(|n| n.as_ref().parse()).collect()
}

/// One measure's value, plus per-label values for macro measures when
/// requested.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureValue {
    pub measure: Measure,
    pub value: f64,
    pub per_label: Option<Vec<f64>>,
}

/// `num / den`, with `den == 0` scored `empty`.
fn ratio(num: f64, den: f64, empty: f64) -> f64 {
    if den == 0.0 {
        empty
    } else {
        num / den
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Confusion {
    tp: usize,
    fp: usize,
    fn_: usize,
}

impl Confusion {
    fn perfect_empty(self) -> f64 {
        if self.tp + self.fp + self.fn_ == 0 {
            1.0
        } else {
            0.0
        }
    }

    fn precision(self) -> f64 {
        ratio(self.tp as f64, (self.tp + self.fp) as f64, self.perfect_empty())
    }

    fn recall(self) -> f64 {
        ratio(self.tp as f64, (self.tp + self.fn_) as f64, self.perfect_empty())
    }

    fn f_measure(self) -> f64 {
        ratio(
            2.0 * self.tp as f64,
            (2 * self.tp + self.fp + self.fn_) as f64,
            self.perfect_empty(),
        )
    }

    fn jaccard(self) -> f64 {
        ratio(self.tp as f64, (self.tp + self.fp + self.fn_) as f64, 1.0)
    }
}

/// Rank of each label by decreasing confidence (1 = best), ties at mid-rank.
fn mid_ranks(conf: &[f64]) -> Vec<f64> {
    conf.iter()
        .map(|&c| {
            let greater = conf.iter().filter(|&&o| o > c).count();
            let equal = conf.iter().filter(|&&o| o == c).count();
            greater as f64 + (equal as f64 + 1.0) / 2.0
        })
        .collect()
}

#[derive(Debug, Default)]
struct RankingSums {
    one_error: (f64, usize),
    coverage: (f64, usize),
    ranking_loss: (f64, usize),
    average_precision: (f64, usize),
}

impl RankingSums {
    fn add(&mut self, truth: &[bool], conf: &[f64]) {
        let relevant: Vec<usize> = (0..truth.len()).filter(|&l| truth[l]).collect();
        if relevant.is_empty() {
            return;
        }
        let irrelevant: Vec<usize> = (0..truth.len()).filter(|&l| !truth[l]).collect();
        let rank = mid_ranks(conf);

        let top = conf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tied_top: Vec<usize> = (0..conf.len()).filter(|&l| conf[l] == top).collect();
        let wrong_top = tied_top.iter().filter(|&&l| !truth[l]).count();
        self.one_error.0 += wrong_top as f64 / tied_top.len() as f64;
        self.one_error.1 += 1;

        let worst = relevant.iter().map(|&l| rank[l]).fold(f64::NEG_INFINITY, f64::max);
        self.coverage.0 += worst - 1.0;
        self.coverage.1 += 1;

        // Precision at each relevant label: its mid-rank among the relevant
        // labels over its mid-rank among all labels.
        let relevant_conf: Vec<f64> = relevant.iter().map(|&l| conf[l]).collect();
        let relevant_rank = mid_ranks(&relevant_conf);
        let mut ap = 0.0;
        for (i, &l) in relevant.iter().enumerate() {
            ap += relevant_rank[i] / rank[l];
        }
        self.average_precision.0 += ap / relevant.len() as f64;
        self.average_precision.1 += 1;

        if !irrelevant.is_empty() {
            let mut misordered = 0.0;
            for &y in &relevant {
                for &n in &irrelevant {
                    if conf[y] < conf[n] {
                        misordered += 1.0;
                    } else if conf[y] == conf[n] {
                        misordered += 0.5;
                    }
                }
            }
            self.ranking_loss.0 += misordered / (relevant.len() * irrelevant.len()) as f64;
            self.ranking_loss.1 += 1;
        }
    }
}

fn mean_or(sum: (f64, usize), empty: f64) -> f64 {
    if sum.1 == 0 {
        empty
    } else {
        sum.0 / sum.1 as f64
    }
}

/// Computes `measures` in the order given.
pub fn evaluate(
    truth: &LabelMatrix,
    preds: &[Prediction],
    measures: &[Measure],
    per_label: bool,
) -> Result<Vec<MeasureValue>, MetricsError> {
    let m = truth.num_rows();
    let q = truth.num_labels();
    if preds.len() != m {
        return Err(MetricsError::LengthMismatch {
            what: "predictions",
            expected: m,
            found: preds.len(),
        });
    }
    for p in preds {
        for found in [p.bipartition.len(), p.confidences.len()] {
            if found != q {
                return Err(MetricsError::LengthMismatch {
                    what: "labels per prediction",
                    expected: q,
                    found,
                });
            }
        }
    }

    let mut labels = vec![Confusion::default(); q];
    let mut hamming = 0.0;
    let mut subset = 0.0;
    let (mut ex_p, mut ex_r, mut ex_f, mut ex_a) = (0.0, 0.0, 0.0, 0.0);
    let mut ranking = RankingSums::default();
    for (y, p) in truth.rows().zip(preds) {
        let mut row = Confusion::default();
        for (l, c) in labels.iter_mut().enumerate() {
            match (y[l], p.bipartition[l]) {
                (true, true) => {
                    row.tp += 1;
                    c.tp += 1;
                }
                (false, true) => {
                    row.fp += 1;
                    c.fp += 1;
                }
                (true, false) => {
                    row.fn_ += 1;
                    c.fn_ += 1;
                }
                (false, false) => {}
            }
        }
        hamming += (row.fp + row.fn_) as f64 / q as f64;
        subset += f64::from(u8::from(row.fp + row.fn_ == 0));
        ex_p += row.precision();
        ex_r += row.recall();
        ex_f += row.f_measure();
        ex_a += row.jaccard();
        ranking.add(y, &p.confidences);
    }
    let micro = labels.iter().fold(Confusion::default(), |a, c| Confusion {
        tp: a.tp + c.tp,
        fp: a.fp + c.fp,
        fn_: a.fn_ + c.fn_,
    });
    let n = m as f64;
    let macro_value = |f: fn(Confusion) -> f64| {
        let v: Vec<f64> = labels.iter().map(|&c| f(c)).collect();
        (v.iter().sum::<f64>() / q as f64, v)
    };

    Ok(measures
        .iter()
        .map(|&measure| {
            let (value, per) = match measure {
                Measure::HammingLoss => (hamming / n, None),
                Measure::SubsetAccuracy => (subset / n, None),
                Measure::ExamplePrecision => (ex_p / n, None),
                Measure::ExampleRecall => (ex_r / n, None),
                Measure::ExampleFMeasure => (ex_f / n, None),
                Measure::ExampleAccuracy => (ex_a / n, None),
                Measure::MicroPrecision => (micro.precision(), None),
                Measure::MicroRecall => (micro.recall(), None),
                Measure::MicroFMeasure => (micro.f_measure(), None),
                Measure::MacroPrecision => {
                    let (v, p) = macro_value(Confusion::precision);
                    (v, Some(p))
                }
                Measure::MacroRecall => {
                    let (v, p) = macro_value(Confusion::recall);
                    (v, Some(p))
                }
                Measure::MacroFMeasure => {
                    let (v, p) = macro_value(Confusion::f_measure);
                    (v, Some(p))
                }
                Measure::OneError => (mean_or(ranking.one_error, 0.0), None),
                Measure::Coverage => (mean_or(ranking.coverage, 0.0), None),
                Measure::RankingLoss => (mean_or(ranking.ranking_loss, 0.0), None),
                Measure::AveragePrecision => (mean_or(ranking.average_precision, 1.0), None),
            };
            MeasureValue {
                measure,
                value,
                per_label: if per_label { per } else { None },
            }
        })
        .collect())
}
