//! Prediction and imputation of missing values in mixed-type tabular data.
//!
//! The crate covers the full workflow: parse ARFF/CSV tables with missing
//! cells, inject synthetic MCAR missingness with a ground-truth log, train
//! from-scratch learners (decision tree, KNN, SVM via SMO, MLP, linear
//! regression) and their ensembles (bagging, random forest, a heterogeneous
//! three-member voter, ECOC), evaluate them with holdout / k-fold /
//! leave-one-out cross-validation, and impute missing values per attribute
//! or jointly with chained equations (MICE) plus pooling.
//!
//! Everything that draws randomness goes through [`rng::substream`], so
//! identical inputs and seeds reproduce results bit for bit.
//!
//! A narrative guide with runnable snippets lives in `book/` at the
//! repository root; `cargo test` runs the snippets.
pub mod dataset;
pub mod ensembles;
pub mod error;
pub mod evaluation;
pub mod imputation;
pub mod learners;
pub mod missingness;
pub mod rng;

mod linalg;

pub use dataset::{
    encode_features, parse_arff, parse_csv, serialize_arff, serialize_csv, Attribute,
    AttributeKind, Dataset, DatasetSummary, FeatureEncoder, FeatureMatrix, TargetVector,
    TypeInference, Value,
};
pub use ensembles::{
    build_ecoc_matrix, ensemble_predict, train_bagging, train_bagging_mix, train_ecoc,
    train_random_forest, AnyModel, BaggingConfig, BaggingMixConfig, EcocCodeMatrix, EcocConfig,
    EcocScheme, EnsembleConfig, EnsembleModel, FeatureSubsample, ModelConfig, RandomForestConfig,
    TieBreak, VoteRule,
};
pub use error::{DataError, Error, EvalError, ImputeError, ModelError, ParseError, Result};
pub use evaluation::{
    classification_report, confusion_matrix, cross_validate, make_splits, regression_report,
    train_on_rows, ClassificationReport, ConfusionMatrix, EvalReport, RegressionReport, SplitPlan,
    SplitScheme,
};
pub use imputation::{
    evaluate_imputation, impute_single_target, mice_impute, pool_imputations, select_best_model,
    ChainTrace, CycleTrace, ImputationPlan, ImputationScore, MiceConfig, MiceOutcome,
    PooledImputation, SelectionOutcome, SingleImputation,
};
pub use learners::{
    train_decision_tree, train_knn, train_linear_regression, train_mlp, train_svm_smo, KnnConfig,
    LearnerConfig, LinRegConfig, MlpConfig, Prediction, SvmConfig, SvmKernel, Targets, Task,
    TrainedModel, TreeConfig, ZeroRConfig,
};
pub use missingness::{inject_mcar, missingness_report, MaskedCellLog, MissingnessSpec};
