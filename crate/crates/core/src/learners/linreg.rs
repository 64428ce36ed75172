//! Least-squares regression with optional ridge shrinkage.
//!
//! Solves `(XᵀX + λI) β = Xᵀy` over the features plus an intercept column.
//! `λ = 0` requests pure OLS; a singular system then re-solves with
//! `λ = 1e-8` and sets the fallback flag.

use serde::{Deserialize, Serialize};

use super::LinRegConfig;
use crate::dataset::FeatureMatrix;
use crate::error::ModelError;
use crate::linalg;

const FALLBACK_LAMBDA: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinRegModel {
    /// One weight per feature.
    coefficients: Vec<f64>,
    intercept: f64,
    /// Set when the λ = 0 normal equations were singular and the ridge
    /// fallback was used.
    fallback: bool,
}

pub(super) fn train(
    features: &FeatureMatrix,
    targets: &[f64],
    config: &LinRegConfig,
) -> Result<LinRegModel, ModelError> {
    if features.n_rows() == 0 || targets.is_empty() {
        return Err(ModelError::EmptyTrainingSet);
    }
    if features.n_rows() != targets.len() {
        return Err(ModelError::InvalidConfig(format!(
            "{} rows vs {} targets",
            features.n_rows(),
            targets.len()
        )));
    }
    if !(config.ridge_lambda >= 0.0) {
        return Err(ModelError::InvalidConfig(
            "ridge lambda must be non-negative".into(),
        ));
    }

    let p = features.n_cols() + 1; // + intercept
    let mut xtx = vec![vec![0.0_f64; p]; p];
    let mut xty = vec![0.0_f64; p];
    for (r, &y) in targets.iter().enumerate() {
        let row = features.row(r);
        for i in 0..p {
            let xi = if i + 1 == p { 1.0 } else { row[i] };
            xty[i] += xi * y;
            for j in i..p {
                let xj = if j + 1 == p { 1.0 } else { row[j] };
                xtx[i][j] += xi * xj;
            }
        }
    }
    for i in 0..p {
        for j in 0..i {
            xtx[i][j] = xtx[j][i];
        }
    }

    let with_lambda = |lambda: f64| {
        let mut a = xtx.clone();
        for (i, row) in a.iter_mut().enumerate() {
            row[i] += lambda;
        }
        linalg::solve(a, xty.clone(), 1e-10)
    };

    let (beta, fallback) = match with_lambda(config.ridge_lambda) {
        Some(beta) => (beta, false),
        None => {
            let beta = with_lambda(config.ridge_lambda + FALLBACK_LAMBDA).ok_or_else(|| {
                ModelError::InvalidConfig("normal equations unsolvable even with ridge".into())
            })?;
            (beta, true)
        }
    };

    let intercept = beta[p - 1];
    let coefficients = beta[..p - 1].to_vec();
    Ok(LinRegModel {
        coefficients,
        intercept,
        fallback,
    })
}

impl LinRegModel {
    pub fn feature_arity(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn used_fallback(&self) -> bool {
        self.fallback
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        self.intercept
            + self
                .coefficients
                .iter()
                .zip(row)
                .map(|(c, x)| c * x)
                .sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_linear_fit() {
        let m = FeatureMatrix::from_rows((0..10).map(|i| vec![i as f64]).collect());
        let y: Vec<f64> = (0..10).map(|i| 2.0 * i as f64 + 1.0).collect();
        let model = train(&m, &y, &LinRegConfig { ridge_lambda: 0.0 }).unwrap();
        assert!((model.coefficients()[0] - 2.0).abs() < 1e-9);
        assert!((model.intercept() - 1.0).abs() < 1e-9);
        assert!(!model.used_fallback());
        let rmse = (y
            .iter()
            .enumerate()
            .map(|(i, v)| (model.predict(m.row(i)) - v).powi(2))
            .sum::<f64>()
            / y.len() as f64)
            .sqrt();
        assert!(rmse < 1e-9);
        assert!((model.predict(&[3.0]) - 7.0).abs() < 1e-9);
    }

    #[test]
    fn duplicated_columns_trigger_the_ridge_fallback() {
        let m = FeatureMatrix::from_rows((0..8).map(|i| vec![i as f64, i as f64]).collect());
        let y: Vec<f64> = (0..8).map(|i| 2.0 * i as f64 + 1.0).collect();
        let model = train(&m, &y, &LinRegConfig { ridge_lambda: 0.0 }).unwrap();
        assert!(model.used_fallback());
        // predictions still reproduce the targets; the tiny ridge splits the
        // weight across the duplicated columns (minimum-norm limit: 1 and 1)
        for (i, v) in y.iter().enumerate() {
            assert!((model.predict(m.row(i)) - v).abs() < 1e-6);
        }
        assert!((model.coefficients()[0] - 1.0).abs() < 1e-3);
        assert!((model.coefficients()[1] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn constant_target_yields_intercept_only() {
        let m = FeatureMatrix::from_rows((0..5).map(|i| vec![i as f64]).collect());
        let y = vec![4.25; 5];
        let model = train(&m, &y, &LinRegConfig { ridge_lambda: 0.0 }).unwrap();
        assert!((model.intercept() - 4.25).abs() < 1e-9);
        assert!(model.coefficients()[0].abs() < 1e-9);
    }

    #[test]
    fn ridge_shrinks_coefficients() {
        let m = FeatureMatrix::from_rows((0..6).map(|i| vec![i as f64]).collect());
        let y: Vec<f64> = (0..6).map(|i| 3.0 * i as f64).collect();
        let ols = train(&m, &y, &LinRegConfig { ridge_lambda: 0.0 }).unwrap();
        let ridge = train(&m, &y, &LinRegConfig { ridge_lambda: 10.0 }).unwrap();
        assert!(ridge.coefficients()[0].abs() < ols.coefficients()[0].abs());
    }
}
