//! Ensembles over the base learners: bagging with majority/mean voting,
//! random forests, the heterogeneous three-member voter, and ECOC multiclass
//! wrapping.
//!
//! Ensemble members draw their bootstrap samples and training seeds from
//! per-member substreams, so members are independent of each other and may
//! be trained concurrently with results identical to sequential training.

mod ecoc;

pub use ecoc::{build_ecoc_matrix, EcocCodeMatrix, EcocModel, EcocScheme};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{FeatureMatrix, TargetVector};
use crate::error::ModelError;
use crate::learners::{
    build_tree, KnnConfig, LearnerConfig, MlpConfig, Prediction, SvmConfig, Task, TrainedModel,
    TreeConfig,
};
use crate::rng::{derive_seed, substream};

/// How member outputs combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VoteRule {
    /// Mode of the member labels (classification).
    Majority,
    /// Mean of the member values (regression).
    Mean,
}

impl VoteRule {
    pub fn for_task(task: Task) -> VoteRule {
        match task {
            Task::Classification => VoteRule::Majority,
            Task::Regression => VoteRule::Mean,
        }
    }

    fn matches(self, task: Task) -> bool {
        VoteRule::for_task(task) == self
    }
}

/// How tied majority votes resolve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Lowest category index among the tied labels.
    LowestClass,
    /// The given member's label, falling back to the lowest tied index when
    /// that member is not among the tie.
    Member(usize),
}

/// Bootstrap-aggregated homogeneous ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaggingConfig {
    pub base: LearnerConfig,
    pub members: usize,
    pub seed: u64,
    /// `None` resolves from the task at training time; an explicit rule is
    /// validated against the task.
    pub vote: Option<VoteRule>,
}

impl BaggingConfig {
    pub fn new(base: LearnerConfig, members: usize, seed: u64) -> Self {
        BaggingConfig {
            base,
            members,
            seed,
            vote: None,
        }
    }
}

/// Per-split feature subsampling for random forests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSubsample {
    All,
    /// floor(sqrt(feature count)), at least 1.
    Sqrt,
    Fixed(usize),
}

impl FeatureSubsample {
    fn resolve(self, feature_count: usize) -> Result<usize, ModelError> {
        let m = match self {
            FeatureSubsample::All => feature_count,
            FeatureSubsample::Sqrt => (feature_count as f64).sqrt().floor().max(1.0) as usize,
            FeatureSubsample::Fixed(m) => m,
        };
        if m == 0 {
            return Err(ModelError::InvalidConfig("feature subsample of 0".into()));
        }
        if m > feature_count {
            return Err(ModelError::SubsampleTooLarge {
                m,
                n: feature_count,
            });
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForestConfig {
    pub tree: TreeConfig,
    pub members: usize,
    pub feature_subsample: FeatureSubsample,
    pub seed: u64,
}

impl Default for RandomForestConfig {
    fn default() -> Self {
        RandomForestConfig {
            tree: TreeConfig::default(),
            members: 10,
            feature_subsample: FeatureSubsample::Sqrt,
            seed: 0,
        }
    }
}

/// The heterogeneous voter: RBF-kernel SVM (ECOC-wrapped beyond two
/// classes) + 1-nearest-neighbor + MLP with majority voting for nominal
/// targets; linear regression + 1-NN + MLP with mean voting for numeric
/// targets. Three-way ties go to the first (SVM) member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaggingMixConfig {
    pub seed: u64,
}

/// ECOC wrapping of a binary learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcocConfig {
    pub binary: LearnerConfig,
    pub scheme: EcocScheme,
    pub seed: u64,
}

impl EcocConfig {
    /// The linear-SVM flavor the reproduction scripts use.
    pub fn linear_svm(seed: u64) -> Self {
        EcocConfig {
            binary: LearnerConfig::Svm(SvmConfig::default()),
            scheme: EcocScheme::OneVsRest,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "ensemble")]
pub enum EnsembleConfig {
    Bagging(BaggingConfig),
    RandomForest(RandomForestConfig),
    BaggingMix(BaggingMixConfig),
    Ecoc(EcocConfig),
}

/// A single learner or an ensemble: everything the evaluation and imputation
/// pipelines need to train something.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "config")]
pub enum ModelConfig {
    Learner(LearnerConfig),
    Ensemble(EnsembleConfig),
}

impl From<LearnerConfig> for ModelConfig {
    fn from(c: LearnerConfig) -> Self {
        ModelConfig::Learner(c)
    }
}

impl From<EnsembleConfig> for ModelConfig {
    fn from(c: EnsembleConfig) -> Self {
        ModelConfig::Ensemble(c)
    }
}

impl ModelConfig {
    pub fn train(
        &self,
        features: &FeatureMatrix,
        targets: &TargetVector,
    ) -> Result<AnyModel, ModelError> {
        match self {
            ModelConfig::Learner(c) => Ok(AnyModel::Single(c.train(features, targets)?)),
            ModelConfig::Ensemble(EnsembleConfig::Bagging(c)) => {
                Ok(AnyModel::Ensemble(train_bagging(features, targets, c)?))
            }
            ModelConfig::Ensemble(EnsembleConfig::RandomForest(c)) => Ok(AnyModel::Ensemble(
                train_random_forest(features, targets, c)?,
            )),
            ModelConfig::Ensemble(EnsembleConfig::BaggingMix(c)) => {
                Ok(AnyModel::Ensemble(train_bagging_mix(features, targets, c)?))
            }
            ModelConfig::Ensemble(EnsembleConfig::Ecoc(c)) => {
                let code = build_ecoc_matrix(
                    match targets {
                        TargetVector::Classes { class_count, .. } => *class_count,
                        TargetVector::Reals(_) => {
                            return Err(ModelError::TaskMismatch(
                                "ECOC needs a nominal target".into(),
                            ))
                        }
                    },
                    c.scheme,
                )?;
                Ok(AnyModel::Ensemble(train_ecoc(
                    features, targets, &c.binary, &code, c.seed,
                )?))
            }
        }
    }

    /// Replaces every embedded seed with one derived from `seed`.
    pub fn reseeded(&self, seed: u64) -> ModelConfig {
        match self {
            ModelConfig::Learner(c) => ModelConfig::Learner(c.reseeded(seed)),
            ModelConfig::Ensemble(EnsembleConfig::Bagging(c)) => {
                ModelConfig::Ensemble(EnsembleConfig::Bagging(BaggingConfig {
                    seed,
                    ..c.clone()
                }))
            }
            ModelConfig::Ensemble(EnsembleConfig::RandomForest(c)) => {
                ModelConfig::Ensemble(EnsembleConfig::RandomForest(RandomForestConfig {
                    seed,
                    ..c.clone()
                }))
            }
            ModelConfig::Ensemble(EnsembleConfig::BaggingMix(_)) => {
                ModelConfig::Ensemble(EnsembleConfig::BaggingMix(BaggingMixConfig { seed }))
            }
            ModelConfig::Ensemble(EnsembleConfig::Ecoc(c)) => {
                ModelConfig::Ensemble(EnsembleConfig::Ecoc(EcocConfig { seed, ..c.clone() }))
            }
        }
    }

    /// Whether feature encoding should standardize numeric columns for this
    /// model (distance- and gradient-based members want it; trees do not).
    pub fn wants_standardization(&self) -> bool {
        match self {
            ModelConfig::Learner(c) => c.wants_standardization(),
            ModelConfig::Ensemble(EnsembleConfig::Bagging(c)) => c.base.wants_standardization(),
            ModelConfig::Ensemble(EnsembleConfig::RandomForest(_)) => false,
            ModelConfig::Ensemble(EnsembleConfig::BaggingMix(_)) => true,
            ModelConfig::Ensemble(EnsembleConfig::Ecoc(c)) => c.binary.wants_standardization(),
        }
    }

    pub fn supports(&self, task: Task) -> bool {
        match self {
            ModelConfig::Learner(c) => c.supports(task),
            ModelConfig::Ensemble(EnsembleConfig::Bagging(c)) => {
                c.base.supports(task)
                    && c.vote.map_or(true, |v| v.matches(task))
            }
            ModelConfig::Ensemble(EnsembleConfig::RandomForest(_)) => true,
            ModelConfig::Ensemble(EnsembleConfig::BaggingMix(_)) => true,
            ModelConfig::Ensemble(EnsembleConfig::Ecoc(_)) => task == Task::Classification,
        }
    }
}

/// A trained single learner or ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "shape")]
pub enum AnyModel {
    Single(TrainedModel),
    Ensemble(EnsembleModel),
}

impl AnyModel {
    pub fn task(&self) -> Task {
        match self {
            AnyModel::Single(m) => m.task(),
            AnyModel::Ensemble(m) => m.task(),
        }
    }

    pub fn feature_arity(&self) -> usize {
        match self {
            AnyModel::Single(m) => m.feature_arity(),
            AnyModel::Ensemble(m) => m.feature_arity(),
        }
    }

    pub fn predict(&self, row: &[f64]) -> Result<Prediction, ModelError> {
        match self {
            AnyModel::Single(m) => m.predict(row),
            AnyModel::Ensemble(m) => m.predict(row),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serialization")
    }
}

/// A trained ensemble: voting members or an ECOC decoder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EnsembleModel {
    Voting {
        members: Vec<AnyModel>,
        vote: VoteRule,
        tie: TieBreak,
    },
    Ecoc(EcocModel),
}

impl EnsembleModel {
    pub fn task(&self) -> Task {
        match self {
            EnsembleModel::Voting { vote, .. } => match vote {
                VoteRule::Majority => Task::Classification,
                VoteRule::Mean => Task::Regression,
            },
            EnsembleModel::Ecoc(_) => Task::Classification,
        }
    }

    pub fn feature_arity(&self) -> usize {
        match self {
            EnsembleModel::Voting { members, .. } => {
                members.first().map(|m| m.feature_arity()).unwrap_or(0)
            }
            EnsembleModel::Ecoc(m) => m.feature_arity(),
        }
    }

    pub fn members(&self) -> usize {
        match self {
            EnsembleModel::Voting { members, .. } => members.len(),
            EnsembleModel::Ecoc(m) => m.members().iter().flatten().count(),
        }
    }

    /// Aggregates member predictions under the vote rule (or decodes the
    /// code word for ECOC).
    pub fn predict(&self, row: &[f64]) -> Result<Prediction, ModelError> {
        match self {
            EnsembleModel::Voting { members, vote, tie } => match vote {
                VoteRule::Majority => {
                    let mut votes = Vec::with_capacity(members.len());
                    for m in members {
                        match m.predict(row)? {
                            Prediction::Class(c) => votes.push(c),
                            Prediction::Real(_) => {
                                return Err(ModelError::TaskMismatch(
                                    "majority vote over a regression member".into(),
                                ))
                            }
                        }
                    }
                    Ok(Prediction::Class(majority_with_tie(&votes, *tie)))
                }
                VoteRule::Mean => {
                    let mut sum = 0.0;
                    for m in members {
                        match m.predict(row)? {
                            Prediction::Real(v) => sum += v,
                            Prediction::Class(_) => {
                                return Err(ModelError::TaskMismatch(
                                    "mean vote over a classification member".into(),
                                ))
                            }
                        }
                    }
                    Ok(Prediction::Real(sum / members.len() as f64))
                }
            },
            EnsembleModel::Ecoc(m) => Ok(Prediction::Class(m.predict(row)?)),
        }
    }
}

/// Free-function alias for the aggregation entry point.
pub fn ensemble_predict(model: &EnsembleModel, row: &[f64]) -> Result<Prediction, ModelError> {
    model.predict(row)
}

fn majority_with_tie(votes: &[usize], tie: TieBreak) -> usize {
    let max_class = votes.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0usize; max_class + 1];
    for &v in votes {
        counts[v] += 1;
    }
    let top = counts.iter().copied().max().unwrap_or(0);
    let tied: Vec<usize> = (0..counts.len()).filter(|&c| counts[c] == top).collect();
    if tied.len() == 1 {
        return tied[0];
    }
    match tie {
        TieBreak::LowestClass => tied[0],
        TieBreak::Member(i) => {
            let preferred = votes.get(i).copied();
            match preferred {
                Some(p) if tied.contains(&p) => p,
                _ => tied[0],
            }
        }
    }
}

/// Deterministic bootstrap draw: `n` indices with replacement from the
/// member's substream.
pub(crate) fn bootstrap_indices(seed: u64, member: u64, n: usize) -> Vec<usize> {
    let mut rng = substream(seed, member);
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

fn resample(
    features: &FeatureMatrix,
    targets: &TargetVector,
    indices: &[usize],
) -> (FeatureMatrix, TargetVector) {
    let rows: Vec<Vec<f64>> = indices.iter().map(|&i| features.row(i).to_vec()).collect();
    let resampled_targets = match targets {
        TargetVector::Classes { labels, class_count } => TargetVector::Classes {
            labels: indices.iter().map(|&i| labels[i]).collect(),
            class_count: *class_count,
        },
        TargetVector::Reals(y) => TargetVector::Reals(indices.iter().map(|&i| y[i]).collect()),
    };
    (FeatureMatrix::from_rows(rows), resampled_targets)
}

/// Trains `members` base models on seeded bootstrap resamples and aggregates
/// them under the vote rule.
pub fn train_bagging(
    features: &FeatureMatrix,
    targets: &TargetVector,
    config: &BaggingConfig,
) -> Result<EnsembleModel, ModelError> {
    if config.members == 0 {
        return Err(ModelError::InvalidConfig("member count must be >= 1".into()));
    }
    if features.n_rows() == 0 {
        return Err(ModelError::EmptyTrainingSet);
    }
    let task = targets.task();
    let vote = config.vote.unwrap_or_else(|| VoteRule::for_task(task));
    if !vote.matches(task) {
        return Err(ModelError::TaskMismatch(format!(
            "{vote:?} vote does not fit a {task:?} target"
        )));
    }
    let mut members = Vec::with_capacity(config.members);
    for i in 0..config.members {
        let indices = bootstrap_indices(config.seed, i as u64, features.n_rows());
        let (member_features, member_targets) = resample(features, targets, &indices);
        let member_config = config.base.reseeded(derive_seed(config.seed, i as u64));
        members.push(AnyModel::Single(
            member_config.train(&member_features, &member_targets)?,
        ));
    }
    Ok(EnsembleModel::Voting {
        members,
        vote,
        tie: TieBreak::LowestClass,
    })
}

/// Bagged trees whose every split considers a fresh random feature subset.
pub fn train_random_forest(
    features: &FeatureMatrix,
    targets: &TargetVector,
    config: &RandomForestConfig,
) -> Result<EnsembleModel, ModelError> {
    if config.members == 0 {
        return Err(ModelError::InvalidConfig("member count must be >= 1".into()));
    }
    if features.n_rows() == 0 {
        return Err(ModelError::EmptyTrainingSet);
    }
    let m = config.feature_subsample.resolve(features.n_cols())?;
    let mut members = Vec::with_capacity(config.members);
    for i in 0..config.members {
        // one substream per member: bootstrap draws first, then any
        // per-split feature sampling continues on the same stream
        let mut rng = substream(config.seed, i as u64);
        let indices: Vec<usize> = (0..features.n_rows())
            .map(|_| rng.random_range(0..features.n_rows()))
            .collect();
        let (member_features, member_targets) = resample(features, targets, &indices);
        let tree = build_tree(
            &member_features,
            &member_targets,
            &config.tree,
            Some(m),
            Some(&mut rng),
        )?;
        members.push(AnyModel::Single(TrainedModel::Tree(tree)));
    }
    Ok(EnsembleModel::Voting {
        members,
        vote: VoteRule::for_task(targets.task()),
        tie: TieBreak::LowestClass,
    })
}

/// Trains the three-member heterogeneous voter on the full training set.
pub fn train_bagging_mix(
    features: &FeatureMatrix,
    targets: &TargetVector,
    config: &BaggingMixConfig,
) -> Result<EnsembleModel, ModelError> {
    if features.n_rows() == 0 {
        return Err(ModelError::EmptyTrainingSet);
    }
    let knn = LearnerConfig::Knn(KnnConfig {
        k: 1.min(features.n_rows()),
    });
    let mlp = LearnerConfig::Mlp(MlpConfig::default());
    match targets {
        TargetVector::Classes { labels, .. } => {
            let mut distinct: Vec<usize> = labels.clone();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() < 2 {
                return Err(ModelError::NotBinary(distinct.len()));
            }
            let svm_config = SvmConfig {
                seed: derive_seed(config.seed, 0),
                ..SvmConfig::rbf()
            };
            let svm_member = if distinct.len() == 2 {
                AnyModel::Single(
                    LearnerConfig::Svm(svm_config).train(features, targets)?,
                )
            } else {
                // more than two classes: wrap the SVM in one-vs-rest ECOC
                let class_count = match targets {
                    TargetVector::Classes { class_count, .. } => *class_count,
                    TargetVector::Reals(_) => unreachable!(),
                };
                let code = build_ecoc_matrix(class_count, EcocScheme::OneVsRest)?;
                AnyModel::Ensemble(train_ecoc(
                    features,
                    targets,
                    &LearnerConfig::Svm(svm_config),
                    &code,
                    derive_seed(config.seed, 0),
                )?)
            };
            let members = vec![
                svm_member,
                AnyModel::Single(knn.train(features, targets)?),
                AnyModel::Single(
                    mlp.reseeded(derive_seed(config.seed, 2)).train(features, targets)?,
                ),
            ];
            Ok(EnsembleModel::Voting {
                members,
                vote: VoteRule::Majority,
                tie: TieBreak::Member(0),
            })
        }
        TargetVector::Reals(_) => {
            let linreg = LearnerConfig::LinReg(Default::default());
            let members = vec![
                AnyModel::Single(linreg.train(features, targets)?),
                AnyModel::Single(knn.train(features, targets)?),
                AnyModel::Single(
                    mlp.reseeded(derive_seed(config.seed, 2)).train(features, targets)?,
                ),
            ];
            Ok(EnsembleModel::Voting {
                members,
                vote: VoteRule::Mean,
                tie: TieBreak::Member(0),
            })
        }
    }
}

/// Trains one binary model per code column and decodes by Hamming distance.
pub fn train_ecoc(
    features: &FeatureMatrix,
    targets: &TargetVector,
    binary: &LearnerConfig,
    code: &EcocCodeMatrix,
    seed: u64,
) -> Result<EnsembleModel, ModelError> {
    Ok(EnsembleModel::Ecoc(ecoc::train_ecoc_model(
        features, targets, binary, code, seed,
    )?))
}
