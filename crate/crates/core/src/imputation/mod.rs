//! Supervised imputation: train on the rows where the target is observed,
//! predict the holes, never touch anything else. Multi-attribute gaps go
//! through chained equations ([`mice_impute`]) with per-chain seeds and
//! pooled results.

mod mice;

pub use mice::{mice_impute, ChainTrace, CycleTrace, MiceConfig, MiceOutcome};

use serde::{Deserialize, Serialize};

use crate::dataset::{AttributeKind, Dataset, FeatureEncoder, Value};
use crate::ensembles::{AnyModel, ModelConfig};
use crate::error::ImputeError;
use crate::evaluation::{cross_validate, EvalReport, SplitPlan};
use crate::learners::{Prediction, Task};
use crate::missingness::MaskedCellLog;
use crate::rng::derive_seed;

/// Everything that determines a single-target imputation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImputationPlan {
    pub target: usize,
    pub model: ModelConfig,
    /// Split scheme used when this plan is part of model selection.
    pub selection: SplitPlan,
    pub seed: u64,
}

impl ImputationPlan {
    pub fn new(target: usize, model: ModelConfig, seed: u64) -> Self {
        ImputationPlan {
            target,
            model,
            selection: SplitPlan::kfold(10, seed),
            seed,
        }
    }
}

/// Result of [`impute_single_target`].
#[derive(Debug, Clone, PartialEq)]
pub struct SingleImputation {
    pub dataset: Dataset,
    /// The trained predictor; `None` when nothing was trained (no-op or
    /// degenerate fill).
    pub model: Option<AnyModel>,
    /// The target had no missing cells; the dataset is returned unchanged.
    pub no_op: bool,
    /// The nominal target had a single observed class; holes were filled
    /// with it directly.
    pub degenerate: bool,
}

/// Fills every missing cell of the plan's target attribute with a prediction
/// from a model trained on the observed-target rows. All other cells are
/// untouched.
pub fn impute_single_target(
    dataset: &Dataset,
    plan: &ImputationPlan,
) -> Result<SingleImputation, ImputeError> {
    let attr = dataset.attribute(plan.target).map_err(ImputeError::Data)?;
    let attr_name = attr.name.clone();
    let attr_kind = attr.kind.clone();
    let task = match &attr_kind {
        AttributeKind::Nominal(_) => Task::Classification,
        AttributeKind::Numeric => Task::Regression,
    };
    if !plan.model.supports(task) {
        return Err(ImputeError::Model(crate::error::ModelError::TaskMismatch(
            format!("model cannot predict {task:?} target `{attr_name}`"),
        )));
    }

    let missing = dataset.missing_rows(plan.target);
    if missing.is_empty() {
        return Ok(SingleImputation {
            dataset: dataset.clone(),
            model: None,
            no_op: true,
            degenerate: false,
        });
    }
    let observed = dataset.observed_rows(plan.target);
    if observed.is_empty() {
        return Err(ImputeError::NoObservedValues(attr_name));
    }
    if observed.len() < 2 {
        return Err(ImputeError::TooFewObserved(attr_name));
    }

    // a nominal target with one observed class cannot train a classifier;
    // fill with that class and flag the degenerate case
    if let AttributeKind::Nominal(_) = &attr_kind {
        let mut distinct: Vec<usize> = observed
            .iter()
            .map(|&r| dataset.cell(r, plan.target).as_nominal().expect("observed"))
            .collect();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() == 1 {
            let mut completed = dataset.clone();
            for &r in &missing {
                completed
                    .set_cell(r, plan.target, Value::Nominal(distinct[0]))
                    .map_err(ImputeError::Data)?;
            }
            return Ok(SingleImputation {
                dataset: completed,
                model: None,
                no_op: false,
                degenerate: true,
            });
        }
    }

    let config = plan.model.reseeded(derive_seed(plan.seed, 0));
    let encoder = FeatureEncoder::fit(
        dataset,
        plan.target,
        &observed,
        config.wants_standardization(),
    )
    .map_err(ImputeError::Data)?;
    let features = encoder.transform(dataset, &observed);
    let targets = encoder.targets(dataset, &observed).map_err(ImputeError::Data)?;
    let model = config.train(&features, &targets).map_err(ImputeError::Model)?;

    let mut completed = dataset.clone();
    for &r in &missing {
        let encoded = encoder.encode_row(dataset, r);
        let value = match model.predict(&encoded).map_err(ImputeError::Model)? {
            Prediction::Class(c) => Value::Nominal(c),
            Prediction::Real(v) => {
                if !v.is_finite() {
                    return Err(ImputeError::Model(crate::error::ModelError::InvalidConfig(
                        format!("non-finite prediction for row {r}"),
                    )));
                }
                Value::Numeric(v)
            }
        };
        completed
            .set_cell(r, plan.target, value)
            .map_err(ImputeError::Data)?;
    }
    Ok(SingleImputation {
        dataset: completed,
        model: Some(model),
        no_op: false,
        degenerate: false,
    })
}

/// Per-candidate evaluation outcome inside [`select_best_model`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub config: ModelConfig,
    /// The evaluation report, or the error message that prevented one.
    pub outcome: Result<EvalReport, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionOutcome {
    pub best_index: usize,
    pub best: ModelConfig,
    pub candidates: Vec<CandidateReport>,
}

/// Cross-validates every candidate on the observed-target rows and ranks:
/// accuracy (descending, ties by weighted F-measure) for nominal targets,
/// RMSE (ascending, ties by MAE) for numeric ones; remaining ties keep the
/// earlier candidate.
pub fn select_best_model(
    dataset: &Dataset,
    target: usize,
    candidates: &[ModelConfig],
    plan: &SplitPlan,
) -> Result<SelectionOutcome, ImputeError> {
    if candidates.is_empty() {
        return Err(ImputeError::NoViableCandidate("no candidates given".into()));
    }
    let nominal = dataset
        .attribute(target)
        .map_err(ImputeError::Data)?
        .kind
        .is_nominal();

    let mut reports = Vec::with_capacity(candidates.len());
    let mut best: Option<(usize, (f64, f64))> = None;
    for (i, candidate) in candidates.iter().enumerate() {
        match cross_validate(dataset, target, candidate, plan) {
            Ok(report) => {
                // rank key: higher is better on both components
                let key = match &report {
                    EvalReport::Classification { report, .. } => (
                        report.accuracy,
                        report.weighted.f_measure.unwrap_or(f64::NEG_INFINITY),
                    ),
                    EvalReport::Regression { report } => (-report.rmse, -report.mae),
                };
                debug_assert_eq!(nominal, matches!(report, EvalReport::Classification { .. }));
                let better = match &best {
                    None => true,
                    Some((_, best_key)) => {
                        key.0 > best_key.0 || (key.0 == best_key.0 && key.1 > best_key.1)
                    }
                };
                if better {
                    best = Some((i, key));
                }
                reports.push(CandidateReport {
                    config: candidate.clone(),
                    outcome: Ok(report),
                });
            }
            Err(e) => reports.push(CandidateReport {
                config: candidate.clone(),
                outcome: Err(e.to_string()),
            }),
        }
    }
    match best {
        Some((best_index, _)) => Ok(SelectionOutcome {
            best_index,
            best: candidates[best_index].clone(),
            candidates: reports,
        }),
        None => {
            let last = reports
                .iter()
                .rev()
                .find_map(|r| r.outcome.as_ref().err().cloned())
                .unwrap_or_default();
            Err(ImputeError::NoViableCandidate(last))
        }
    }
}

/// One pooled cell with its spread across the chains: sample variance for
/// numeric cells, agreement fraction of the modal label for nominal ones.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PooledCell {
    pub row: usize,
    pub attribute: usize,
    pub value: Value,
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PooledImputation {
    pub dataset: Dataset,
    pub cells: Vec<PooledCell>,
}

impl PooledImputation {
    /// CSV rendering: `row,attribute,pooled_value,variance_or_agreement`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,attribute,pooled_value,variance_or_agreement\n");
        for cell in &self.cells {
            let name = &self.dataset.attributes()[cell.attribute].name;
            let value = self.dataset.format_value(cell.attribute, &cell.value);
            out.push_str(&format!("{},{name},{value},{}\n", cell.row, cell.spread));
        }
        out
    }
}

/// Pools `m` completed datasets cell-by-cell over the holes of `original`:
/// numeric cells average (with sample variance), nominal cells take the mode
/// (ties toward the lower category index, with agreement fraction).
pub fn pool_imputations(
    original: &Dataset,
    imputations: &[Dataset],
) -> Result<PooledImputation, ImputeError> {
    if imputations.is_empty() {
        return Err(ImputeError::NoViableCandidate(
            "no imputations to pool".into(),
        ));
    }
    for imp in imputations {
        if imp.attributes() != original.attributes() || imp.n_rows() != original.n_rows() {
            return Err(ImputeError::SchemaMismatch);
        }
    }
    let m = imputations.len() as f64;
    let mut pooled = original.clone();
    let mut cells = Vec::new();
    for row in 0..original.n_rows() {
        for attr in 0..original.n_attributes() {
            if !original.cell(row, attr).is_missing() {
                continue;
            }
            match &original.attributes()[attr].kind {
                AttributeKind::Numeric => {
                    let mut values = Vec::with_capacity(imputations.len());
                    for imp in imputations {
                        values.push(imp.cell(row, attr).as_numeric().ok_or(
                            ImputeError::IncompleteImputation {
                                row,
                                attribute: original.attributes()[attr].name.clone(),
                            },
                        )?);
                    }
                    let mean = values.iter().sum::<f64>() / m;
                    let variance = if values.len() < 2 {
                        0.0
                    } else {
                        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0)
                    };
                    pooled
                        .set_cell(row, attr, Value::Numeric(mean))
                        .map_err(ImputeError::Data)?;
                    cells.push(PooledCell {
                        row,
                        attribute: attr,
                        value: Value::Numeric(mean),
                        spread: variance,
                    });
                }
                AttributeKind::Nominal(categories) => {
                    let mut counts = vec![0usize; categories.len()];
                    for imp in imputations {
                        let c = imp.cell(row, attr).as_nominal().ok_or(
                            ImputeError::IncompleteImputation {
                                row,
                                attribute: original.attributes()[attr].name.clone(),
                            },
                        )?;
                        counts[c] += 1;
                    }
                    let mode = counts
                        .iter()
                        .enumerate()
                        .max_by(|(i, x), (j, y)| x.cmp(y).then(j.cmp(i)))
                        .map(|(i, _)| i)
                        .expect("non-empty categories");
                    let agreement = counts[mode] as f64 / m;
                    pooled
                        .set_cell(row, attr, Value::Nominal(mode))
                        .map_err(ImputeError::Data)?;
                    cells.push(PooledCell {
                        row,
                        attribute: attr,
                        value: Value::Nominal(mode),
                        spread: agreement,
                    });
                }
            }
        }
    }
    Ok(PooledImputation { dataset: pooled, cells })
}

/// Per-attribute imputation quality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttributeScore {
    pub attribute: usize,
    pub name: String,
    pub cells: usize,
    #[serde(flatten)]
    pub metric: AttributeMetric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "metric", content = "value")]
pub enum AttributeMetric {
    Accuracy(f64),
    Rmse(f64),
}

/// Imputation quality against a masked-cell log: exact-restore accuracy for
/// nominal cells, RMSE for numeric cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImputationScore {
    pub nominal_cells: usize,
    pub nominal_correct: usize,
    pub nominal_accuracy: Option<f64>,
    pub numeric_cells: usize,
    pub numeric_rmse: Option<f64>,
    pub per_attribute: Vec<AttributeScore>,
}

/// Scores `imputed` against the ground truth recorded in `log`. `original`
/// is the pre-injection dataset and is used to validate the log.
pub fn evaluate_imputation(
    original: &Dataset,
    log: &MaskedCellLog,
    imputed: &Dataset,
) -> Result<ImputationScore, ImputeError> {
    if imputed.attributes() != original.attributes() || imputed.n_rows() != original.n_rows() {
        return Err(ImputeError::SchemaMismatch);
    }
    let mut nominal_cells = 0;
    let mut nominal_correct = 0;
    let mut numeric_cells = 0;
    let mut numeric_sq_err = 0.0;
    let mut per_attr: std::collections::BTreeMap<usize, (usize, usize, f64)> =
        std::collections::BTreeMap::new();

    for cell in &log.entries {
        let truth = original.cell(cell.row, cell.attribute);
        if truth != &cell.original || truth.is_missing() {
            return Err(ImputeError::LogMismatch(format!(
                "row {}, attribute {}: log holds {:?} but the dataset holds {:?}",
                cell.row, cell.attribute, cell.original, truth
            )));
        }
        let guess = imputed.cell(cell.row, cell.attribute);
        if guess.is_missing() {
            return Err(ImputeError::IncompleteImputation {
                row: cell.row,
                attribute: original.attributes()[cell.attribute].name.clone(),
            });
        }
        let entry = per_attr.entry(cell.attribute).or_insert((0, 0, 0.0));
        entry.0 += 1;
        match (truth, guess) {
            (Value::Nominal(t), Value::Nominal(g)) => {
                nominal_cells += 1;
                if t == g {
                    nominal_correct += 1;
                    entry.1 += 1;
                }
            }
            (Value::Numeric(t), Value::Numeric(g)) => {
                numeric_cells += 1;
                let d = g - t;
                numeric_sq_err += d * d;
                entry.2 += d * d;
            }
            _ => {
                return Err(ImputeError::LogMismatch(format!(
                    "row {}, attribute {}: kind mismatch",
                    cell.row, cell.attribute
                )))
            }
        }
    }

    let per_attribute = per_attr
        .into_iter()
        .map(|(attr, (cells, correct, sq_err))| {
            let name = original.attributes()[attr].name.clone();
            let metric = match original.attributes()[attr].kind {
                AttributeKind::Nominal(_) => {
                    AttributeMetric::Accuracy(correct as f64 / cells as f64)
                }
                AttributeKind::Numeric => {
                    AttributeMetric::Rmse((sq_err / cells as f64).sqrt())
                }
            };
            AttributeScore {
                attribute: attr,
                name,
                cells,
                metric,
            }
        })
        .collect();

    Ok(ImputationScore {
        nominal_cells,
        nominal_correct,
        nominal_accuracy: (nominal_cells > 0)
            .then(|| nominal_correct as f64 / nominal_cells as f64),
        numeric_cells,
        numeric_rmse: (numeric_cells > 0)
            .then(|| (numeric_sq_err / numeric_cells as f64).sqrt()),
        per_attribute,
    })
}

pub(crate) fn observed_mean_or_mode(
    dataset: &Dataset,
    attr: usize,
) -> Result<Value, ImputeError> {
    let observed = dataset.observed_rows(attr);
    if observed.is_empty() {
        return Err(ImputeError::NoObservedValues(
            dataset.attributes()[attr].name.clone(),
        ));
    }
    Ok(match &dataset.attributes()[attr].kind {
        AttributeKind::Numeric => {
            let sum: f64 = observed
                .iter()
                .map(|&r| dataset.cell(r, attr).as_numeric().expect("observed"))
                .sum();
            Value::Numeric(sum / observed.len() as f64)
        }
        AttributeKind::Nominal(categories) => {
            let mut counts = vec![0usize; categories.len()];
            for &r in &observed {
                counts[dataset.cell(r, attr).as_nominal().expect("observed")] += 1;
            }
            let mode = counts
                .iter()
                .enumerate()
                .max_by(|(i, x), (j, y)| x.cmp(y).then(j.cmp(i)))
                .map(|(i, _)| i)
                .expect("non-empty categories");
            Value::Nominal(mode)
        }
    })
}

#[cfg(test)]
mod tests;
