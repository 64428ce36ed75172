//! From-scratch base learners behind one train/predict contract.
//!
//! Every trainer is a pure function of `(features, targets, config)`: the
//! configs embed any seed they need, so repeated runs produce identical
//! models. Trained models are immutable, cheap to share across threads, and
//! serialize to a versioned JSON document.

mod knn;
mod linreg;
mod mlp;
mod svm;
mod tree;
mod zeror;

pub use knn::KnnModel;
pub use linreg::LinRegModel;
pub use mlp::MlpModel;
pub use svm::{SvmClassifierModel, SvmModel};
pub use tree::TreeModel;
pub use zeror::ZeroRModel;

pub(crate) use tree::build_tree;

use serde::{Deserialize, Serialize};

use crate::dataset::{FeatureMatrix, TargetVector};
use crate::error::ModelError;

/// What a model predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Classification,
    Regression,
}

impl TargetVector {
    pub fn task(&self) -> Task {
        match self {
            TargetVector::Classes { .. } => Task::Classification,
            TargetVector::Reals(_) => Task::Regression,
        }
    }
}

/// A single predicted cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prediction {
    Class(usize),
    Real(f64),
}

impl Prediction {
    pub fn as_class(&self) -> Option<usize> {
        match self {
            Prediction::Class(c) => Some(*c),
            _ => None,
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            Prediction::Real(v) => Some(*v),
            _ => None,
        }
    }
}

/// Alias kept for readers who think in terms of the uniform contract.
pub type Targets = TargetVector;

/// Decision tree hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    pub max_depth: usize,
    pub min_leaf_size: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: 20,
            min_leaf_size: 2,
        }
    }
}

/// K-nearest-neighbor hyperparameters. Distance is Euclidean on the encoded
/// features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnConfig {
    pub k: usize,
}

impl Default for KnnConfig {
    fn default() -> Self {
        KnnConfig { k: 5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SvmKernel {
    Linear,
    /// `gamma = None` resolves to 1 / feature-count at training time.
    Rbf { gamma: Option<f64> },
}

/// SMO-trained support vector machine hyperparameters. The solver picks its
/// second working index from a seeded stream, so `seed` is part of the
/// configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    pub kernel: SvmKernel,
    pub c: f64,
    pub tolerance: f64,
    pub max_passes: usize,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            kernel: SvmKernel::Linear,
            c: 1.0,
            tolerance: 1e-3,
            max_passes: 10,
            seed: 0,
        }
    }
}

impl SvmConfig {
    pub fn rbf() -> Self {
        SvmConfig {
            kernel: SvmKernel::Rbf { gamma: None },
            ..SvmConfig::default()
        }
    }
}

/// One-hidden-layer perceptron hyperparameters: sigmoid hidden units, a
/// softmax/cross-entropy head for classification or a linear/squared-loss
/// head for regression, trained by seeded mini-batch gradient descent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub hidden_units: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden_units: 16,
            learning_rate: 0.1,
            epochs: 500,
            batch_size: 32,
            seed: 0,
        }
    }
}

/// Ridge-regularized least squares; `lambda = 0` asks for pure OLS and falls
/// back to `lambda = 1e-8` (with a flag) when the normal equations are
/// singular.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinRegConfig {
    pub ridge_lambda: f64,
}

impl Default for LinRegConfig {
    fn default() -> Self {
        LinRegConfig { ridge_lambda: 0.0 }
    }
}

/// Majority-class / mean-value baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ZeroRConfig {}

/// Uniform tag over every base learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "learner")]
pub enum LearnerConfig {
    Tree(TreeConfig),
    Knn(KnnConfig),
    Svm(SvmConfig),
    Mlp(MlpConfig),
    LinReg(LinRegConfig),
    ZeroR(ZeroRConfig),
}

impl LearnerConfig {
    /// Trains the configured learner. Fails on empty input, config/task
    /// mismatches, and learner-specific preconditions.
    pub fn train(
        &self,
        features: &FeatureMatrix,
        targets: &TargetVector,
    ) -> Result<TrainedModel, ModelError> {
        match self {
            LearnerConfig::Tree(c) => train_decision_tree(features, targets, c),
            LearnerConfig::Knn(c) => train_knn(features, targets, c),
            LearnerConfig::Svm(c) => svm::train_svm_classifier(features, targets, c),
            LearnerConfig::Mlp(c) => train_mlp(features, targets, c),
            LearnerConfig::LinReg(c) => match targets {
                TargetVector::Reals(y) => train_linear_regression(features, y, c),
                TargetVector::Classes { .. } => Err(ModelError::TaskMismatch(
                    "linear regression needs a numeric target".into(),
                )),
            },
            LearnerConfig::ZeroR(_) => zeror::train_zero_r(features, targets),
        }
    }

    /// Replaces any embedded seed; identity for deterministic learners.
    pub fn reseeded(&self, seed: u64) -> LearnerConfig {
        match self {
            LearnerConfig::Svm(c) => LearnerConfig::Svm(SvmConfig { seed, ..c.clone() }),
            LearnerConfig::Mlp(c) => LearnerConfig::Mlp(MlpConfig { seed, ..c.clone() }),
            other => other.clone(),
        }
    }

    /// Whether this learner benefits from standardized numeric features.
    /// Trees and the baseline are split/count based and do not care.
    pub fn wants_standardization(&self) -> bool {
        !matches!(self, LearnerConfig::Tree(_) | LearnerConfig::ZeroR(_))
    }

    pub fn supports(&self, task: Task) -> bool {
        match self {
            LearnerConfig::Svm(_) => task == Task::Classification,
            LearnerConfig::LinReg(_) => task == Task::Regression,
            _ => true,
        }
    }
}

/// A fitted predictor. Variant payloads hold the learner-specific
/// parameters; all expose the task, training arity, and `predict`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "model")]
pub enum TrainedModel {
    Tree(TreeModel),
    Knn(KnnModel),
    Svm(SvmClassifierModel),
    Mlp(MlpModel),
    LinReg(LinRegModel),
    ZeroR(ZeroRModel),
}

impl TrainedModel {
    pub fn task(&self) -> Task {
        match self {
            TrainedModel::Tree(m) => m.task(),
            TrainedModel::Knn(m) => m.task(),
            TrainedModel::Svm(_) => Task::Classification,
            TrainedModel::Mlp(m) => m.task(),
            TrainedModel::LinReg(_) => Task::Regression,
            TrainedModel::ZeroR(m) => m.task(),
        }
    }

    pub fn feature_arity(&self) -> usize {
        match self {
            TrainedModel::Tree(m) => m.feature_arity(),
            TrainedModel::Knn(m) => m.feature_arity(),
            TrainedModel::Svm(m) => m.feature_arity(),
            TrainedModel::Mlp(m) => m.feature_arity(),
            TrainedModel::LinReg(m) => m.feature_arity(),
            TrainedModel::ZeroR(m) => m.feature_arity(),
        }
    }

    /// Predicts one encoded row. Classification returns a valid category
    /// index, regression a finite real.
    pub fn predict(&self, row: &[f64]) -> Result<Prediction, ModelError> {
        check_arity(self.feature_arity(), row.len())?;
        Ok(match self {
            TrainedModel::Tree(m) => m.predict(row),
            TrainedModel::Knn(m) => m.predict(row),
            TrainedModel::Svm(m) => Prediction::Class(m.predict(row)),
            TrainedModel::Mlp(m) => m.predict(row),
            TrainedModel::LinReg(m) => Prediction::Real(m.predict(row)),
            TrainedModel::ZeroR(m) => m.predict(),
        })
    }

    /// Signed score for two-class models: positive means class 1. The SVM
    /// reports its decision value and the MLP its probability difference;
    /// vote-style models fall back to a hard ±1.
    pub fn binary_margin(&self, row: &[f64]) -> Result<f64, ModelError> {
        check_arity(self.feature_arity(), row.len())?;
        match self {
            TrainedModel::Svm(m) => Ok(m.decision_value(row)),
            TrainedModel::Mlp(m) => m.binary_margin(row),
            other => match other.predict(row)? {
                Prediction::Class(1) => Ok(1.0),
                Prediction::Class(_) => Ok(-1.0),
                Prediction::Real(_) => Err(ModelError::TaskMismatch(
                    "binary margin of a regression model".into(),
                )),
            },
        }
    }

    /// Versioned JSON document for save/load.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ModelDocument {
            format_version: MODEL_FORMAT_VERSION,
            model: self.clone(),
        })
        .expect("model serialization")
    }

    pub fn from_json(text: &str) -> Result<TrainedModel, ModelError> {
        let doc: ModelDocument = serde_json::from_str(text)
            .map_err(|e| ModelError::InvalidConfig(format!("model document: {e}")))?;
        if doc.format_version != MODEL_FORMAT_VERSION {
            return Err(ModelError::InvalidConfig(format!(
                "unsupported model format version {}",
                doc.format_version
            )));
        }
        Ok(doc.model)
    }
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    format_version: u32,
    model: TrainedModel,
}

pub(crate) fn check_arity(expected: usize, found: usize) -> Result<(), ModelError> {
    if expected == found {
        Ok(())
    } else {
        Err(ModelError::ArityMismatch { expected, found })
    }
}

pub(crate) fn check_nonempty(features: &FeatureMatrix, targets: &TargetVector) -> Result<(), ModelError> {
    if features.n_rows() == 0 || targets.is_empty() {
        return Err(ModelError::EmptyTrainingSet);
    }
    debug_assert_eq!(features.n_rows(), targets.len());
    Ok(())
}

/// Majority class among `labels` with ties toward the lowest category index.
pub(crate) fn majority_class(labels: impl Iterator<Item = usize>, class_count: usize) -> usize {
    let mut counts = vec![0usize; class_count];
    for l in labels {
        counts[l] += 1;
    }
    counts
        .iter()
        .enumerate()
        .max_by(|(i, x), (j, y)| x.cmp(y).then(j.cmp(i)))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

pub fn train_decision_tree(
    features: &FeatureMatrix,
    targets: &TargetVector,
    config: &TreeConfig,
) -> Result<TrainedModel, ModelError> {
    Ok(TrainedModel::Tree(tree::build_tree(
        features, targets, config, None, None,
    )?))
}

pub fn train_knn(
    features: &FeatureMatrix,
    targets: &TargetVector,
    config: &KnnConfig,
) -> Result<TrainedModel, ModelError> {
    Ok(TrainedModel::Knn(knn::train(features, targets, config)?))
}

/// Raw binary SMO entry point: labels must be -1/+1. The classifier-shaped
/// wrapper used by [`LearnerConfig`] maps class indices onto the signs.
pub fn train_svm_smo(
    features: &FeatureMatrix,
    signs: &[f64],
    config: &SvmConfig,
) -> Result<SvmModel, ModelError> {
    svm::train(features, signs, config)
}

pub fn train_mlp(
    features: &FeatureMatrix,
    targets: &TargetVector,
    config: &MlpConfig,
) -> Result<TrainedModel, ModelError> {
    Ok(TrainedModel::Mlp(mlp::train(features, targets, config)?))
}

pub fn train_linear_regression(
    features: &FeatureMatrix,
    targets: &[f64],
    config: &LinRegConfig,
) -> Result<TrainedModel, ModelError> {
    Ok(TrainedModel::LinReg(linreg::train(features, targets, config)?))
}
