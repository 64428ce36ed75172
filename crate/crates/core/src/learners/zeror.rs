//! ZeroR baseline: always the majority class or the mean value. Useful as a
//! selection anchor; any model worth keeping has to beat it.

use serde::{Deserialize, Serialize};

use super::{majority_class, Prediction, Task, TrainedModel};
use crate::dataset::{FeatureMatrix, TargetVector};
use crate::error::ModelError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroRModel {
    arity: usize,
    value: Prediction,
}

pub(super) fn train_zero_r(
    features: &FeatureMatrix,
    targets: &TargetVector,
) -> Result<TrainedModel, ModelError> {
    super::check_nonempty(features, targets)?;
    let value = match targets {
        TargetVector::Classes { labels, class_count } => {
            Prediction::Class(majority_class(labels.iter().copied(), *class_count))
        }
        TargetVector::Reals(y) => Prediction::Real(y.iter().sum::<f64>() / y.len() as f64),
    };
    Ok(TrainedModel::ZeroR(ZeroRModel {
        arity: features.n_cols(),
        value,
    }))
}

impl ZeroRModel {
    pub fn task(&self) -> Task {
        match self.value {
            Prediction::Class(_) => Task::Classification,
            Prediction::Real(_) => Task::Regression,
        }
    }

    pub fn feature_arity(&self) -> usize {
        self.arity
    }

    pub fn predict(&self) -> Prediction {
        self.value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn majority_and_mean() {
        let m = FeatureMatrix::from_rows(vec![vec![0.0], vec![1.0], vec![2.0]]);
        let model = train_zero_r(
            &m,
            &TargetVector::Classes { labels: vec![1, 1, 0], class_count: 2 },
        )
        .unwrap();
        assert_eq!(model.predict(&[9.0]).unwrap(), Prediction::Class(1));

        let model = train_zero_r(&m, &TargetVector::Reals(vec![1.0, 2.0, 6.0])).unwrap();
        assert_eq!(model.predict(&[9.0]).unwrap(), Prediction::Real(3.0));
    }
}
