//! K-nearest neighbors: a lazy model that stores its training data and
//! answers queries by majority label or mean value of the k closest rows
//! under Euclidean distance. Distance ties resolve in training-row order.

use serde::{Deserialize, Serialize};

use super::{majority_class, KnnConfig, Prediction, Task};
use crate::dataset::{FeatureMatrix, TargetVector};
use crate::error::ModelError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    k: usize,
    arity: usize,
    data: Vec<f64>,
    targets: StoredTargets,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
enum StoredTargets {
    Classes { labels: Vec<usize>, class_count: usize },
    Reals { values: Vec<f64> },
}

pub(super) fn train(
    features: &FeatureMatrix,
    targets: &TargetVector,
    config: &KnnConfig,
) -> Result<KnnModel, ModelError> {
    super::check_nonempty(features, targets)?;
    if config.k == 0 {
        return Err(ModelError::InvalidConfig("k must be at least 1".into()));
    }
    if config.k > features.n_rows() {
        return Err(ModelError::KTooLarge {
            k: config.k,
            n: features.n_rows(),
        });
    }
    let data = (0..features.n_rows())
        .flat_map(|r| features.row(r).iter().copied())
        .collect();
    let targets = match targets {
        TargetVector::Classes { labels, class_count } => StoredTargets::Classes {
            labels: labels.clone(),
            class_count: *class_count,
        },
        TargetVector::Reals(values) => StoredTargets::Reals {
            values: values.clone(),
        },
    };
    Ok(KnnModel {
        k: config.k,
        arity: features.n_cols(),
        data,
        targets,
    })
}

impl KnnModel {
    pub fn task(&self) -> Task {
        match self.targets {
            StoredTargets::Classes { .. } => Task::Classification,
            StoredTargets::Reals { .. } => Task::Regression,
        }
    }

    pub fn feature_arity(&self) -> usize {
        self.arity
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn n_rows(&self) -> usize {
        if self.arity == 0 {
            0
        } else {
            self.data.len() / self.arity
        }
    }

    pub fn predict(&self, row: &[f64]) -> Prediction {
        let n = self.n_rows();
        let mut dist: Vec<(f64, usize)> = (0..n)
            .map(|i| {
                let start = i * self.arity;
                let d2 = self.data[start..start + self.arity]
                    .iter()
                    .zip(row)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>();
                (d2, i)
            })
            .collect();
        // stable order: distance, then training-row index
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let nearest = &dist[..self.k];
        match &self.targets {
            StoredTargets::Classes { labels, class_count } => Prediction::Class(majority_class(
                nearest.iter().map(|&(_, i)| labels[i]),
                *class_count,
            )),
            StoredTargets::Reals { values } => {
                let mean = nearest.iter().map(|&(_, i)| values[i]).sum::<f64>() / self.k as f64;
                Prediction::Real(mean)
            }
        }
    }
}
