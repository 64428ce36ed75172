//! Model evaluation: seeded data splitting, pooled confusion matrices, and
//! the classification/regression metric suites.
//!
//! Cross-validation is leakage-free by construction: feature-encoding
//! statistics (fill means/modes, standardization) are fitted on each fold's
//! training rows only, so test rows never influence the trained model.

mod metrics;
mod render;
mod splits;

pub use metrics::{
    classification_report, confusion_matrix, regression_report, ClassMetrics,
    ClassificationReport, ConfusionMatrix, RegressionReport, WeightedMetrics,
};
pub use splits::{make_splits, SplitPlan, SplitScheme};

use serde::{Deserialize, Serialize};

use crate::dataset::{AttributeKind, Dataset, FeatureEncoder};
use crate::ensembles::{AnyModel, ModelConfig};
use crate::error::EvalError;
use crate::learners::{Prediction, Task};

/// Outcome of an evaluation run: the task decides the shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "task")]
pub enum EvalReport {
    Classification {
        report: ClassificationReport,
        confusion: ConfusionMatrix,
    },
    Regression {
        report: RegressionReport,
    },
}

impl EvalReport {
    pub fn accuracy(&self) -> Option<f64> {
        match self {
            EvalReport::Classification { report, .. } => Some(report.accuracy),
            EvalReport::Regression { .. } => None,
        }
    }

    pub fn rmse(&self) -> Option<f64> {
        match self {
            EvalReport::Classification { .. } => None,
            EvalReport::Regression { report } => Some(report.rmse),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            EvalReport::Classification { report, confusion } => {
                render::render_classification(report, confusion)
            }
            EvalReport::Regression { report } => render::render_regression(report),
        }
    }
}

/// Fits the feature encoder on `rows` only and trains the configured model
/// there. This is the per-fold unit of [`cross_validate`], exposed so
/// callers can verify that test rows never leak into training.
pub fn train_on_rows(
    dataset: &Dataset,
    target: usize,
    rows: &[usize],
    config: &ModelConfig,
) -> Result<(FeatureEncoder, AnyModel), EvalError> {
    let encoder = FeatureEncoder::fit(dataset, target, rows, config.wants_standardization())
        .map_err(EvalError::Data)?;
    let features = encoder.transform(dataset, rows);
    let targets = encoder.targets(dataset, rows).map_err(EvalError::Data)?;
    let model = config.train(&features, &targets).map_err(EvalError::Model)?;
    Ok((encoder, model))
}

/// Evaluates `config` on the observed-target rows of `dataset` under the
/// split plan: per split, encode on the training rows, train, predict the
/// test rows, and pool everything into one report. Deterministic per seed.
pub fn cross_validate(
    dataset: &Dataset,
    target: usize,
    config: &ModelConfig,
    plan: &SplitPlan,
) -> Result<EvalReport, EvalError> {
    let attr = dataset.attribute(target).map_err(EvalError::Data)?;
    let rows = dataset.observed_rows(target);
    if rows.len() < 2 {
        return Err(EvalError::DegenerateTarget(format!(
            "attribute `{}` has {} observed rows",
            attr.name,
            rows.len()
        )));
    }

    match &attr.kind {
        AttributeKind::Nominal(categories) => {
            if !config.supports(Task::Classification) {
                return Err(EvalError::Model(crate::error::ModelError::TaskMismatch(
                    format!("model cannot classify nominal target `{}`", attr.name),
                )));
            }
            let labels: Vec<usize> = rows
                .iter()
                .map(|&r| dataset.cell(r, target).as_nominal().expect("observed"))
                .collect();
            {
                let mut distinct = labels.clone();
                distinct.sort_unstable();
                distinct.dedup();
                if distinct.len() < 2 {
                    return Err(EvalError::DegenerateTarget(format!(
                        "attribute `{}` has a single observed class",
                        attr.name
                    )));
                }
            }
            let splits = make_splits(rows.len(), plan, Some(&labels))?;
            let mut truth = Vec::with_capacity(rows.len());
            let mut predicted = Vec::with_capacity(rows.len());
            for (train_local, test_local) in &splits {
                let train_rows: Vec<usize> = train_local.iter().map(|&i| rows[i]).collect();
                let (encoder, model) = train_on_rows(dataset, target, &train_rows, config)?;
                for &i in test_local {
                    let encoded = encoder.encode_row(dataset, rows[i]);
                    match model.predict(&encoded).map_err(EvalError::Model)? {
                        Prediction::Class(c) => {
                            truth.push(labels[i]);
                            predicted.push(c);
                        }
                        Prediction::Real(_) => {
                            return Err(EvalError::Model(
                                crate::error::ModelError::TaskMismatch(
                                    "regression output for a nominal target".into(),
                                ),
                            ))
                        }
                    }
                }
            }
            let confusion = confusion_matrix(&truth, &predicted, categories)?;
            let report = classification_report(&confusion)?;
            Ok(EvalReport::Classification { report, confusion })
        }
        AttributeKind::Numeric => {
            if !config.supports(Task::Regression) {
                return Err(EvalError::Model(crate::error::ModelError::TaskMismatch(
                    format!("model cannot regress numeric target `{}`", attr.name),
                )));
            }
            let values: Vec<f64> = rows
                .iter()
                .map(|&r| dataset.cell(r, target).as_numeric().expect("observed"))
                .collect();
            let splits = make_splits(rows.len(), plan, None)?;
            let mut truth = Vec::with_capacity(rows.len());
            let mut predicted = Vec::with_capacity(rows.len());
            for (train_local, test_local) in &splits {
                let train_rows: Vec<usize> = train_local.iter().map(|&i| rows[i]).collect();
                let (encoder, model) = train_on_rows(dataset, target, &train_rows, config)?;
                for &i in test_local {
                    let encoded = encoder.encode_row(dataset, rows[i]);
                    match model.predict(&encoded).map_err(EvalError::Model)? {
                        Prediction::Real(v) => {
                            truth.push(values[i]);
                            predicted.push(v);
                        }
                        Prediction::Class(_) => {
                            return Err(EvalError::Model(
                                crate::error::ModelError::TaskMismatch(
                                    "classification output for a numeric target".into(),
                                ),
                            ))
                        }
                    }
                }
            }
            let report = regression_report(&truth, &predicted)?;
            Ok(EvalReport::Regression { report })
        }
    }
}
