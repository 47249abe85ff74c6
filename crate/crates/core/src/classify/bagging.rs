use super::{ClassifierSpec, ClassifyError, Learner, Model, ParamReader, Prediction, Registry, TrainedModel};
use crate::data::{select_bags, Bag, MimlDataset};
use crate::par::{self, Execution};
use crate::rng::SeededRng;

/// Bootstrap aggregation of any registered classifier.
///
/// Member samples are drawn from one seeded stream before any member is
/// trained, so the ensemble does not depend on the execution mode. The
/// ensemble confidence is the members' mean confidence; a label is positive
/// when at least half of the members predict it.
#[derive(Debug)]
pub struct MimlBagging {
    pub base: Box<dyn Learner>,
    pub num_classifiers: usize,
    pub seed: u64,
    pub with_replacement: bool,
    /// Sample size as a percentage of the training set, in `(0, 100]`.
    pub sample_percentage: f64,
}

impl MimlBagging {
    pub fn new(base: Box<dyn Learner>) -> Self {
        Self {
            base,
            num_classifiers: 10,
            seed: 1,
            with_replacement: true,
            sample_percentage: 100.0,
        }
    }

    pub fn from_spec(spec: &ClassifierSpec, registry: &Registry) -> Result<Self, ClassifyError> {
        let mut p = ParamReader::new(spec);
        let base = p
            .nested("baseClassifier")?
            .ok_or_else(|| ClassifyError::bad("baseClassifier", "is required"))?;
        let mut learner = Self::new(registry.build(&base)?);
        if let Some(t) = p.count("numClassifiers")? {
            learner.num_classifiers = t;
        }
        if let Some(s) = p.parse("seed")? {
            learner.seed = s;
        }
        if let Some(w) = p.boolean("sampleWithReplacement")? {
            learner.with_replacement = w;
        }
        if let Some(pct) = p.parse::<f64>("samplePercentage")? {
            if !(pct > 0.0 && pct <= 100.0) {
                return Err(ClassifyError::bad("samplePercentage", "must lie in (0, 100]"));
            }
            learner.sample_percentage = pct;
        }
        p.finish()?;
        Ok(learner)
    }

    /// Training indices for each member, in member order.
    pub fn member_samples(&self, m: usize) -> Vec<Vec<usize>> {
        let n = ((self.sample_percentage / 100.0 * m as f64).round() as usize).clamp(1, m);
        let mut rng = SeededRng::new(self.seed);
        (0..self.num_classifiers)
            .map(|_| {
                if self.with_replacement {
                    (0..n).map(|_| rng.below(m)).collect()
                } else {
                    let mut all: Vec<usize> = (0..m).collect();
                    rng.shuffle(&mut all);
                    all.truncate(n);
                    all.sort_unstable();
                    all
                }
            })
            .collect()
    }
}

#[derive(Debug)]
struct BaggingModel {
    members: Vec<TrainedModel>,
    q: usize,
}

impl Model for BaggingModel {
    fn predict(&self, bag: &Bag) -> Prediction {
        let mut sum = vec![0.0; self.q];
        let mut votes = vec![0usize; self.q];
        for member in &self.members {
            let p = member.predict(bag).expect("members share the ensemble's dimension");
            for l in 0..self.q {
                sum[l] += p.confidences[l];
                votes[l] += usize::from(p.bipartition[l]);
            }
        }
        let t = self.members.len();
        Prediction {
            bipartition: votes.iter().map(|&v| 2 * v >= t).collect(),
            confidences: sum.iter().map(|s| s / t as f64).collect(),
        }
    }
}

impl Learner for MimlBagging {
    fn fit(&self, ds: &MimlDataset, exec: Execution) -> Result<TrainedModel, ClassifyError> {
        let samples = self.member_samples(ds.num_bags());
        let members = par::try_map_indexed(exec, samples.len(), |t| {
            let sample = select_bags(ds, &samples[t])?;
            self.base.fit(&sample, exec)
        })?;
        let q = ds.num_labels();
        Ok(TrainedModel::new(ds.dim(), q, Box::new(BaggingModel { members, q })))
    }
}
