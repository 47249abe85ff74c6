//! Seeded generator of small birds-like MIML datasets: each bag is a
//! recording made of segment feature vectors, each label a species whose
//! segments cluster around a species prototype.
//!
//! Output depends on the `rand_distr` sampling algorithms, so committed
//! fixtures rather than regenerated ones are used where bit-stability
//! matters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::data::{AttributeSchema, Bag, LabelMatrix, MimlDataset};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub relation: String,
    pub num_bags: usize,
    pub dim: usize,
    /// One prevalence per label, in `(0, 1]`; its length is the label count.
    pub prevalence: Vec<f64>,
    /// Instances per bag are drawn uniformly from this inclusive range.
    pub bag_size: (usize, usize),
    /// Standard deviation of segments around their prototype.
    pub noise: f64,
    pub seed: u64,
}

pub const BIRD_LABELS: [&str; 5] = [
    "Brown_Creeper",
    "Pacific_Wren",
    "Pacific_slope_Flycatcher",
    "Red_breasted_Nuthatch",
    "Dark_eyed_Junco",
];

impl SyntheticSpec {
    /// 30 recordings, 8 segment features, 5 species of decreasing prevalence.
    pub fn birds_like(seed: u64) -> Self {
        Self {
            relation: "miml_birds".to_string(),
            num_bags: 30,
            dim: 8,
            prevalence: vec![0.5, 0.4, 0.3, 0.2, 0.15],
            bag_size: (1, 6),
            noise: 0.6,
            seed,
        }
    }
}

pub fn generate(spec: &SyntheticSpec) -> MimlDataset {
    let q = spec.prevalence.len();
    let d = spec.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let unit = Normal::new(0.0, 1.0).expect("valid normal");
    let noise = Normal::new(0.0, spec.noise).expect("valid normal");
    let prototypes: Vec<Vec<f64>> = (0..q)
        .map(|_| (0..d).map(|_| 3.0 * unit.sample(&mut rng)).collect())
        .collect();

    let mut bags = Vec::with_capacity(spec.num_bags);
    let mut rows = Vec::with_capacity(spec.num_bags);
    for i in 0..spec.num_bags {
        let mut labels: Vec<bool> = spec.prevalence.iter().map(|&p| rng.random_bool(p)).collect();
        if !labels.contains(&true) {
            labels[rng.random_range(0..q)] = true;
        }
        let present: Vec<usize> = (0..q).filter(|&l| labels[l]).collect();
        let n = rng.random_range(spec.bag_size.0.max(present.len())..=spec.bag_size.1.max(present.len()));
        let mut values = Vec::with_capacity(n * d);
        for s in 0..n {
            // Every present species gets a segment; the rest are background.
            let center = present.get(s).map(|&l| prototypes[l].as_slice());
            for j in 0..d {
                let base = center.map_or(0.0, |c| c[j]);
                let spread = if center.is_some() {
                    noise.sample(&mut rng)
                } else {
                    2.0 * unit.sample(&mut rng)
                };
                values.push(((base + spread) * 1e4).round() / 1e4);
            }
        }
        bags.push(Bag::new(format!("rec{:03}", i + 1), d, values).expect("finite values"));
        rows.push(labels);
    }

    let names = (0..q)
        .map(|l| {
            BIRD_LABELS
                .get(l)
                .map_or_else(|| format!("label{l}"), |s| s.to_string())
        })
        .collect();
    let schema = AttributeSchema::new((0..d).map(|j| format!("f{}", j + 1)).collect()).expect("valid schema");
    let labels = LabelMatrix::new(names, &rows).expect("valid labels");
    MimlDataset::with_attribute_names(&spec.relation, "bag_id", "bag", schema, bags, labels).expect("valid dataset")
}
