//! Representative classification of fairgroups, fairness metrics, and the
//! baseline-versus-fairgroup experiment.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::classifiers::{self, ClassifierError, LinearModel, ModelKind, TrainConfig};
use crate::clustering::{self, Clustering, ClusteringError, DEFAULT_MAX_ITERS};
use crate::dataset::{Dataset, DatasetError};
use crate::fairgroups::{self, BalanceRatio, FairgroupError, FairgroupPlan};
use crate::importance::{self, ImportanceError, ImportanceMatrix};
use crate::metrics;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Importance(#[from] ImportanceError),
    #[error(transparent)]
    Clustering(#[from] ClusteringError),
    #[error(transparent)]
    Fairgroup(#[from] FairgroupError),
    #[error("fairgroup {0} has no members")]
    EmptyGroup(usize),
    #[error("fairgroup plan does not partition the {0} points")]
    BrokenPartition(usize),
    #[error("vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("dataset has no protected feature")]
    NoProtected,
    #[error("alpha must lie in [0, 1], got {0}")]
    BadAlpha(f64),
    #[error("unknown propagation mode `{0}`; expected one-sided or two-sided")]
    UnknownMode(alloc::string::String),
    #[error("representative {point} of fairgroup {group} disagrees with the model")]
    RepresentativeMismatch { group: usize, point: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PropagationMode {
    /// A negative representative leaves the other members to the model.
    OneSided,
    /// The representative's label, either way, goes to the whole group.
    TwoSided,
}

impl PropagationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PropagationMode::OneSided => "one-sided",
            PropagationMode::TwoSided => "two-sided",
        }
    }
}

impl fmt::Display for PropagationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PropagationMode {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "one-sided" => Ok(PropagationMode::OneSided),
            "two-sided" => Ok(PropagationMode::TwoSided),
            other => Err(PipelineError::UnknownMode(other.into())),
        }
    }
}

/// How a point received its fair label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Representative(usize),
    Propagated(usize),
    Individual,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairPrediction {
    pub labels: Vec<bool>,
    pub provenance: Vec<Provenance>,
    pub seed: u64,
}

impl FairPrediction {
    /// `(group id, point)` of every representative, in group order.
    pub fn representatives(&self) -> Vec<(usize, usize)> {
        let mut reps: Vec<(usize, usize)> = self
            .provenance
            .iter()
            .enumerate()
            .filter_map(|(j, p)| match p {
                Provenance::Representative(g) => Some((*g, j)),
                _ => None,
            })
            .collect();
        reps.sort_unstable();
        reps
    }
}

/// Labels the points of `d` through the fairgroups of `plan`.
///
/// One member per group is drawn uniformly and classified by `model`. A
/// positive draw labels the whole group positive. A negative draw labels the
/// group negative in two-sided mode; in one-sided mode the other members are
/// classified individually. Unmatched points are always classified
/// individually.
pub fn fair_classify(
    model: &LinearModel,
    d: &Dataset,
    plan: &FairgroupPlan,
    mode: PropagationMode,
    seed: u64,
) -> Result<FairPrediction, PipelineError> {
    if plan.n != d.len() || !plan.is_partition() {
        return Err(PipelineError::BrokenPartition(d.len()));
    }
    let individual = model.predict(d)?;
    let mut labels = individual.clone();
    let mut provenance = alloc::vec![Provenance::Individual; d.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (g, group) in plan.groups.iter().enumerate() {
        if group.members.is_empty() {
            return Err(PipelineError::EmptyGroup(g));
        }
        let rep = group.members[rng.random_range(0..group.members.len())];
        let positive = individual[rep];
        for &j in &group.members {
            if j == rep {
                provenance[j] = Provenance::Representative(g);
            } else if positive || mode == PropagationMode::TwoSided {
                labels[j] = positive;
                provenance[j] = Provenance::Propagated(g);
            }
        }
    }
    Ok(FairPrediction {
        labels,
        provenance,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FairnessReport {
    pub n: usize,
    pub positives: usize,
    /// Percent of correct labels.
    pub accuracy: f64,
    /// Percent of predicted positives that are protected.
    pub protected_share_positive: f64,
    pub positive_class_balance: f64,
    pub negative_class_balance: f64,
    pub alpha: f64,
    /// Whether the class predicted `i` is alpha-fair, indexed by label.
    pub alpha_fair: [bool; 2],
    /// No point was predicted positive.
    pub degenerate: bool,
}

/// Accuracy and protected-feature balance of the predicted classes.
pub fn evaluate(
    pred: &[bool],
    truth: &[bool],
    protected: &[bool],
    alpha: f64,
) -> Result<FairnessReport, PipelineError> {
    if pred.len() != truth.len() {
        return Err(PipelineError::LengthMismatch(pred.len(), truth.len()));
    }
    if pred.len() != protected.len() {
        return Err(PipelineError::LengthMismatch(pred.len(), protected.len()));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(PipelineError::BadAlpha(alpha));
    }
    let n = pred.len();
    let correct = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    // counts[label][protected]
    let mut counts = [[0usize; 2]; 2];
    for (&p, &a) in pred.iter().zip(protected) {
        counts[p as usize][a as usize] += 1;
    }
    let positives = counts[1][0] + counts[1][1];
    let pos_balance = metrics::balance(counts[1][0], counts[1][1]);
    let neg_balance = metrics::balance(counts[0][0], counts[0][1]);
    Ok(FairnessReport {
        n,
        positives,
        accuracy: if n == 0 { 0.0 } else { 100.0 * correct as f64 / n as f64 },
        protected_share_positive: if positives == 0 {
            0.0
        } else {
            100.0 * counts[1][1] as f64 / positives as f64
        },
        positive_class_balance: pos_balance,
        negative_class_balance: neg_balance,
        alpha,
        alpha_fair: [
            metrics::is_alpha_fair(neg_balance, alpha),
            metrics::is_alpha_fair(pos_balance, alpha),
        ],
        degenerate: positives == 0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub train: TrainConfig,
    pub k: usize,
    pub ratio: BalanceRatio,
    pub mode: PropagationMode,
    pub alpha: f64,
    /// Fraction of rows used for training.
    pub split: f64,
    pub seed_split: u64,
    pub seed_cluster: u64,
    pub seed_representative: u64,
    pub max_iters: usize,
}

impl ExperimentConfig {
    /// Defaults: 5 clusters, ratio 4:1, two-sided, alpha 0.25, 80/20 split.
    pub fn new(kind: ModelKind) -> Self {
        Self {
            train: TrainConfig::new(kind),
            k: 5,
            ratio: fairgroups::reduce_ratio(4, 1).expect("nonzero parts"),
            mode: PropagationMode::TwoSided,
            alpha: 0.25,
            split: 0.8,
            seed_split: 1,
            seed_cluster: 2,
            seed_representative: 3,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }
}

/// Everything an experiment produced, for reports and audits. Indices in
/// `importance`, `clustering`, `plan` and the label vectors refer to rows of
/// the test set; `test_rows` maps them back to the input dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub baseline: FairnessReport,
    pub fair: FairnessReport,
    pub model: LinearModel,
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
    pub baseline_labels: Vec<bool>,
    pub prediction: FairPrediction,
    pub importance: ImportanceMatrix,
    pub clustering: Clustering,
    pub plan: FairgroupPlan,
}

/// Splits `d`, trains on the training rows, and evaluates the test rows
/// both directly and through fairgroups.
///
/// Correlations and weights come from the training rows; ranks, clusters
/// and fairgroups are formed over the test rows.
pub fn run_experiment(d: &Dataset, cfg: &ExperimentConfig) -> Result<ExperimentOutcome, PipelineError> {
    if d.protected_name().is_none() {
        return Err(PipelineError::NoProtected);
    }
    if !(0.0..=1.0).contains(&cfg.alpha) {
        return Err(PipelineError::BadAlpha(cfg.alpha));
    }
    let (train_rows, test_rows) = d.split_indices(cfg.split, cfg.seed_split)?;
    let train = d.select_rows(&train_rows)?;
    let test = d.select_rows(&test_rows)?;
    let protected = test.protected_flags().ok_or(PipelineError::NoProtected)?;
    let truth = test.labels();

    let model = classifiers::train(&train, &cfg.train)?;
    let baseline_labels = model.predict(&test)?;
    let baseline = evaluate(&baseline_labels, &truth, &protected, cfg.alpha)?;

    let importance = importance::build_importance_from(&train, &test)?;
    let clustering = clustering::kmedians(&importance, cfg.k, cfg.seed_cluster, cfg.max_iters)?;
    let plan = fairgroups::build_fairgroups(&clustering, &protected, cfg.ratio)?;
    if !plan.is_partition() {
        return Err(PipelineError::BrokenPartition(test.len()));
    }
    let prediction = fair_classify(&model, &test, &plan, cfg.mode, cfg.seed_representative)?;
    for (group, point) in prediction.representatives() {
        if prediction.labels[point] != baseline_labels[point] {
            return Err(PipelineError::RepresentativeMismatch { group, point });
        }
    }
    let fair = evaluate(&prediction.labels, &truth, &protected, cfg.alpha)?;
    Ok(ExperimentOutcome {
        baseline,
        fair,
        model,
        train_rows,
        test_rows,
        baseline_labels,
        prediction,
        importance,
        clustering,
        plan,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::Standardization;
    use crate::dataset::{FeatureSpec, Kind};
    use crate::fairgroups::Fairgroup;
    use alloc::vec;

    fn identity_model() -> LinearModel {
        // positive iff x >= 0
        LinearModel::from_parts(
            ModelKind::Svm,
            vec!["x".into()],
            vec![1.0],
            0.0,
            Standardization {
                mean: vec![0.0],
                scale: vec![1.0],
            },
        )
        .unwrap()
    }

    fn data(xs: &[f64], prot: &[f64]) -> Dataset {
        Dataset::new(
            vec![
                FeatureSpec::unprotected("x", Kind::Numeric),
                FeatureSpec::unprotected("a", Kind::Binary),
                FeatureSpec::target("y"),
            ],
            vec![xs.to_vec(), prot.to_vec(), vec![0.0; xs.len()]],
        )
        .unwrap()
        .mark_protected("a")
        .unwrap()
    }

    fn single_group(n: usize, p: usize) -> FairgroupPlan {
        FairgroupPlan {
            ratio: fairgroups::reduce_ratio(p as u64, (n - p) as u64).unwrap(),
            groups: vec![Fairgroup {
                members: (0..n).collect(),
                protected: p,
                unprotected: n - p,
                cluster: 0,
            }],
            unmatched: vec![],
            n,
        }
    }

    #[test]
    fn positive_representative_propagates() {
        let d = data(&[1.0, 2.0, 3.0, 4.0, -5.0], &[1.0, 1.0, 1.0, 1.0, 0.0]);
        let plan = single_group(5, 4);
        for seed in 0..20 {
            let fp = fair_classify(&identity_model(), &d, &plan, PropagationMode::TwoSided, seed).unwrap();
            let reps = fp.representatives();
            assert_eq!(reps.len(), 1);
            if reps[0].1 == 4 {
                assert_eq!(fp.labels, vec![false; 5]);
            } else {
                assert_eq!(fp.labels, vec![true; 5]);
            }
        }
    }

    #[test]
    fn one_sided_negative_leaves_members_alone() {
        let d = data(&[-1.0, 2.0, 3.0], &[1.0, 1.0, 0.0]);
        let plan = single_group(3, 2);
        let m = identity_model();
        for seed in 0..30 {
            let fp = fair_classify(&m, &d, &plan, PropagationMode::OneSided, seed).unwrap();
            if fp.representatives()[0].1 == 0 {
                assert_eq!(fp.labels, vec![false, true, true]);
                assert_eq!(fp.provenance[1], Provenance::Individual);
                return;
            }
        }
        panic!("no seed drew the negative member");
    }

    #[test]
    fn evaluate_shares() {
        let pred = [true, true, true, true, true, false];
        let prot = [true, true, true, true, false, false];
        let r = evaluate(&pred, &pred, &prot, 0.25).unwrap();
        assert_eq!(r.accuracy, 100.0);
        assert_eq!(r.protected_share_positive, 80.0);
        assert_eq!(r.positive_class_balance, 0.25);
        assert!(r.alpha_fair[1]);
        assert!(!r.degenerate);

        let none = evaluate(&[false; 3], &[true; 3], &[true, false, true], 0.25).unwrap();
        assert!(none.degenerate);
        assert_eq!(none.protected_share_positive, 0.0);
        assert_eq!(none.positive_class_balance, 0.0);
        assert_eq!(none.accuracy, 0.0);
        assert!(evaluate(&[true], &[true, false], &[true], 0.5).is_err());
    }

    #[test]
    fn modes_parse() {
        assert_eq!("one-sided".parse::<PropagationMode>().unwrap(), PropagationMode::OneSided);
        assert_eq!(PropagationMode::TwoSided.to_string(), "two-sided");
        assert!("both".parse::<PropagationMode>().is_err());
    }
}
