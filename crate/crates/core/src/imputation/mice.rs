//! Chained-equation multiple imputation.
//!
//! Each chain starts from a mean/mode fill, then cycles through the
//! attributes with originally-missing cells in schema order: the attribute's
//! imputed cells are re-predicted by a model trained on its
//! originally-observed rows, using all other attributes (at their current
//! working values) as predictors. Cycles repeat until the change measure
//! drops to the tolerance or the cycle budget runs out.
//!
//! The change measure is scale-free: for numeric attributes the largest
//! absolute change of any imputed cell divided by the attribute's observed
//! standard deviation, for nominal attributes the fraction of imputed labels
//! that changed. Chains are seeded independently and may run concurrently;
//! within a chain, cycles are strictly sequential.

use serde::{Deserialize, Serialize};

use super::observed_mean_or_mode;
use crate::dataset::{AttributeKind, Dataset, FeatureEncoder, Value};
use crate::ensembles::ModelConfig;
use crate::error::ImputeError;
use crate::learners::{LearnerConfig, LinRegConfig, Prediction, TreeConfig};
use crate::rng::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiceConfig {
    /// Number of independent imputation chains.
    pub m: usize,
    pub max_cycles: usize,
    /// Convergence threshold on the per-cycle change measure.
    pub tolerance: f64,
    /// Model for numeric attributes.
    pub numeric_model: ModelConfig,
    /// Model for nominal attributes.
    pub nominal_model: ModelConfig,
    pub seed: u64,
}

impl Default for MiceConfig {
    fn default() -> Self {
        MiceConfig {
            m: 5,
            max_cycles: 10,
            tolerance: 1e-3,
            numeric_model: ModelConfig::Learner(LearnerConfig::LinReg(LinRegConfig::default())),
            nominal_model: ModelConfig::Learner(LearnerConfig::Tree(TreeConfig::default())),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleTrace {
    pub cycle: usize,
    /// Max over attributes of the per-attribute change measures.
    pub change: f64,
    /// (attribute index, change measure) in visit order.
    pub per_attribute: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainTrace {
    pub chain: usize,
    pub converged: bool,
    pub cycles: Vec<CycleTrace>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiceOutcome {
    pub imputations: Vec<Dataset>,
    pub traces: Vec<ChainTrace>,
}

/// Runs `m` independent chained-equation chains and returns one completed
/// dataset per chain plus per-cycle convergence traces.
pub fn mice_impute(dataset: &Dataset, config: &MiceConfig) -> Result<MiceOutcome, ImputeError> {
    if config.m == 0 || config.max_cycles == 0 {
        return Err(ImputeError::Model(crate::error::ModelError::InvalidConfig(
            "m and max_cycles must be at least 1".into(),
        )));
    }
    if !(config.tolerance >= 0.0) {
        return Err(ImputeError::Model(crate::error::ModelError::InvalidConfig(
            "tolerance must be non-negative".into(),
        )));
    }

    // attributes with holes, in schema order, with their missing rows
    let targets: Vec<(usize, Vec<usize>)> = (0..dataset.n_attributes())
        .map(|a| (a, dataset.missing_rows(a)))
        .filter(|(_, rows)| !rows.is_empty())
        .collect();

    if targets.is_empty() {
        return Ok(MiceOutcome {
            imputations: vec![dataset.clone(); config.m],
            traces: (0..config.m)
                .map(|chain| ChainTrace {
                    chain,
                    converged: true,
                    cycles: Vec::new(),
                })
                .collect(),
        });
    }

    for (attr, missing) in &targets {
        let observed = dataset.n_rows() - missing.len();
        if observed == 0 {
            return Err(ImputeError::NoObservedValues(
                dataset.attributes()[*attr].name.clone(),
            ));
        }
        if observed < 2 {
            return Err(ImputeError::TooFewObserved(
                dataset.attributes()[*attr].name.clone(),
            ));
        }
    }

    // observed spread per numeric attribute, for the scale-free measure
    let scales: Vec<f64> = (0..dataset.n_attributes())
        .map(|a| match dataset.attributes()[a].kind {
            AttributeKind::Numeric => {
                let observed: Vec<f64> = dataset
                    .rows()
                    .iter()
                    .filter_map(|row| row[a].as_numeric())
                    .collect();
                if observed.is_empty() {
                    1.0
                } else {
                    let mean = observed.iter().sum::<f64>() / observed.len() as f64;
                    let std = (observed.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                        / observed.len() as f64)
                        .sqrt();
                    if std > 0.0 {
                        std
                    } else {
                        1.0
                    }
                }
            }
            AttributeKind::Nominal(_) => 1.0,
        })
        .collect();

    let mut imputations = Vec::with_capacity(config.m);
    let mut traces = Vec::with_capacity(config.m);
    for chain in 0..config.m {
        let chain_seed = derive_seed(config.seed, chain as u64);
        let (completed, trace) = run_chain(dataset, config, &targets, &scales, chain, chain_seed)?;
        imputations.push(completed);
        traces.push(trace);
    }
    Ok(MiceOutcome { imputations, traces })
}

fn run_chain(
    dataset: &Dataset,
    config: &MiceConfig,
    targets: &[(usize, Vec<usize>)],
    scales: &[f64],
    chain: usize,
    chain_seed: u64,
) -> Result<(Dataset, ChainTrace), ImputeError> {
    let mut work = dataset.clone();

    // step one: simple fill so every predictor is total
    for (attr, missing) in targets {
        let fill = observed_mean_or_mode(dataset, *attr)?;
        for &row in missing {
            work.set_cell(row, *attr, fill).map_err(ImputeError::Data)?;
        }
    }

    let mut cycles = Vec::new();
    let mut converged = false;
    for cycle in 1..=config.max_cycles {
        let mut per_attribute = Vec::with_capacity(targets.len());
        let mut worst: f64 = 0.0;
        for (attr, missing) in targets {
            // the attribute's own imputed cells never train the model:
            // training rows are exactly the originally-observed ones
            let observed: Vec<usize> = (0..dataset.n_rows())
                .filter(|r| !dataset.cell(*r, *attr).is_missing())
                .collect();
            let model_config = match dataset.attributes()[*attr].kind {
                AttributeKind::Numeric => &config.numeric_model,
                AttributeKind::Nominal(_) => &config.nominal_model,
            }
            .reseeded(derive_seed(chain_seed, *attr as u64));

            let encoder = FeatureEncoder::fit(
                &work,
                *attr,
                &observed,
                model_config.wants_standardization(),
            )
            .map_err(ImputeError::Data)?;
            let features = encoder.transform(&work, &observed);
            let target_vec = encoder.targets(&work, &observed).map_err(ImputeError::Data)?;

            // a nominal attribute whose observed cells are a single class
            // stays at its fill value: nothing to learn, nothing changes
            if let crate::dataset::TargetVector::Classes { labels, .. } = &target_vec {
                let mut distinct = labels.clone();
                distinct.sort_unstable();
                distinct.dedup();
                if distinct.len() < 2 {
                    per_attribute.push((*attr, 0.0));
                    continue;
                }
            }

            let model = model_config
                .train(&features, &target_vec)
                .map_err(ImputeError::Model)?;

            let mut change: f64 = 0.0;
            let mut changed_labels = 0usize;
            for &row in missing {
                let encoded = encoder.encode_row(&work, row);
                let new_value = match model.predict(&encoded).map_err(ImputeError::Model)? {
                    Prediction::Class(c) => Value::Nominal(c),
                    Prediction::Real(v) => {
                        if !v.is_finite() {
                            return Err(ImputeError::Model(
                                crate::error::ModelError::InvalidConfig(format!(
                                    "non-finite prediction for row {row}"
                                )),
                            ));
                        }
                        Value::Numeric(v)
                    }
                };
                let old_value = *work.cell(row, *attr);
                match (old_value, new_value) {
                    (Value::Numeric(old), Value::Numeric(new)) => {
                        change = change.max((new - old).abs() / scales[*attr]);
                    }
                    (Value::Nominal(old), Value::Nominal(new)) => {
                        if old != new {
                            changed_labels += 1;
                        }
                    }
                    _ => unreachable!("kind-stable imputation"),
                }
                work.set_cell(row, *attr, new_value).map_err(ImputeError::Data)?;
            }
            if dataset.attributes()[*attr].kind.is_nominal() {
                change = changed_labels as f64 / missing.len() as f64;
            }
            worst = worst.max(change);
            per_attribute.push((*attr, change));
        }
        cycles.push(CycleTrace {
            cycle,
            change: worst,
            per_attribute,
        });
        if worst <= config.tolerance {
            converged = true;
            break;
        }
    }

    Ok((
        work,
        ChainTrace {
            chain,
            converged,
            cycles,
        },
    ))
}
