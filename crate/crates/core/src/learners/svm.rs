//! Binary SVM trained with the simplified two-heuristic SMO variant: sweep
//! the first working index, draw the second from a seeded stream, optimize
//! the pair analytically, repeat until a configured number of consecutive
//! sweeps changes nothing.
//!
//! The decision value is `f(x) = Σ αᵢ yᵢ K(xᵢ, x) + b`; prediction is its
//! sign. Multiclass wrapping lives in the ensembles module (ECOC), not here.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{SvmConfig, SvmKernel};
use crate::dataset::{FeatureMatrix, TargetVector};
use crate::error::ModelError;
use crate::rng::substream;

/// Kernel with every parameter resolved against the training data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ResolvedKernel {
    Linear,
    Rbf { gamma: f64 },
}

impl ResolvedKernel {
    fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            ResolvedKernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            ResolvedKernel::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * d2).exp()
            }
        }
    }
}

/// Raw binary model over -1/+1 labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    kernel: ResolvedKernel,
    arity: usize,
    /// Support vectors (rows with α > 0), flattened row-major.
    support: Vec<f64>,
    /// α of each support vector.
    alphas: Vec<f64>,
    /// Label (±1) of each support vector.
    labels: Vec<f64>,
    bias: f64,
}

impl SvmModel {
    pub fn feature_arity(&self) -> usize {
        self.arity
    }

    pub fn n_support(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn support_labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn decision_value(&self, row: &[f64]) -> f64 {
        let mut sum = self.bias;
        for (i, (&alpha, &label)) in self.alphas.iter().zip(&self.labels).enumerate() {
            let sv = &self.support[i * self.arity..(i + 1) * self.arity];
            sum += alpha * label * self.kernel.eval(sv, row);
        }
        sum
    }

    /// Sign of the decision value; zero counts as positive.
    pub fn predict_sign(&self, row: &[f64]) -> f64 {
        if self.decision_value(row) >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }
}

// hard cap on full sweeps so pathological inputs stay bounded
const MAX_SWEEPS: usize = 10_000;

pub(super) fn train(
    features: &FeatureMatrix,
    signs: &[f64],
    config: &SvmConfig,
) -> Result<SvmModel, ModelError> {
    let n = features.n_rows();
    if n == 0 || signs.is_empty() {
        return Err(ModelError::EmptyTrainingSet);
    }
    if signs.len() != n {
        return Err(ModelError::InvalidConfig(format!(
            "{n} rows vs {} labels",
            signs.len()
        )));
    }
    if signs.iter().any(|&y| y != 1.0 && y != -1.0) {
        return Err(ModelError::InvalidConfig("labels must be -1 or +1".into()));
    }
    let distinct = usize::from(signs.contains(&1.0)) + usize::from(signs.contains(&-1.0));
    if distinct != 2 {
        return Err(ModelError::NotBinary(distinct));
    }
    if config.c <= 0.0 || config.tolerance <= 0.0 || config.max_passes == 0 {
        return Err(ModelError::InvalidConfig(
            "c, tolerance, and max_passes must be positive".into(),
        ));
    }

    let kernel = match config.kernel {
        SvmKernel::Linear => ResolvedKernel::Linear,
        SvmKernel::Rbf { gamma } => ResolvedKernel::Rbf {
            gamma: gamma.unwrap_or(1.0 / features.n_cols().max(1) as f64),
        },
    };

    // cache the Gram matrix when it comfortably fits
    let cache: Option<Vec<f64>> = (n <= 2048).then(|| {
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = kernel.eval(features.row(i), features.row(j));
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
        }
        k
    });
    let kval = |i: usize, j: usize| match &cache {
        Some(k) => k[i * n + j],
        None => kernel.eval(features.row(i), features.row(j)),
    };

    let mut alphas = vec![0.0_f64; n];
    let mut b = 0.0_f64;
    let c = config.c;
    let mut rng = substream(config.seed, 0);

    let decision = |alphas: &[f64], b: f64, k: usize| -> f64 {
        let mut sum = b;
        for i in 0..n {
            if alphas[i] > 0.0 {
                sum += alphas[i] * signs[i] * kval(i, k);
            }
        }
        sum
    };

    let mut quiet_passes = 0;
    let mut sweeps = 0;
    while quiet_passes < config.max_passes && sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut changed = 0;
        for i in 0..n {
            let e_i = decision(&alphas, b, i) - signs[i];
            let r_i = signs[i] * e_i;
            if !((r_i < -config.tolerance && alphas[i] < c)
                || (r_i > config.tolerance && alphas[i] > 0.0))
            {
                continue;
            }
            // second index drawn uniformly from the other rows
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let e_j = decision(&alphas, b, j) - signs[j];

            let (alpha_i_old, alpha_j_old) = (alphas[i], alphas[j]);
            let (lo, hi) = if signs[i] != signs[j] {
                (
                    (alpha_j_old - alpha_i_old).max(0.0),
                    (c + alpha_j_old - alpha_i_old).min(c),
                )
            } else {
                (
                    (alpha_i_old + alpha_j_old - c).max(0.0),
                    (alpha_i_old + alpha_j_old).min(c),
                )
            };
            if lo >= hi {
                continue;
            }
            let eta = 2.0 * kval(i, j) - kval(i, i) - kval(j, j);
            if eta >= 0.0 {
                continue;
            }
            let alpha_j_new =
                (alpha_j_old - signs[j] * (e_i - e_j) / eta).clamp(lo, hi);
            if (alpha_j_new - alpha_j_old).abs() < 1e-5 {
                continue;
            }
            let alpha_i_new = alpha_i_old + signs[i] * signs[j] * (alpha_j_old - alpha_j_new);

            let b1 = b
                - e_i
                - signs[i] * (alpha_i_new - alpha_i_old) * kval(i, i)
                - signs[j] * (alpha_j_new - alpha_j_old) * kval(i, j);
            let b2 = b
                - e_j
                - signs[i] * (alpha_i_new - alpha_i_old) * kval(i, j)
                - signs[j] * (alpha_j_new - alpha_j_old) * kval(j, j);
            alphas[i] = alpha_i_new;
            alphas[j] = alpha_j_new;
            b = if alpha_i_new > 0.0 && alpha_i_new < c {
                b1
            } else if alpha_j_new > 0.0 && alpha_j_new < c {
                b2
            } else {
                (b1 + b2) / 2.0
            };
            changed += 1;
        }
        quiet_passes = if changed == 0 { quiet_passes + 1 } else { 0 };
    }

    let mut support = Vec::new();
    let mut sv_alphas = Vec::new();
    let mut sv_labels = Vec::new();
    for i in 0..n {
        if alphas[i] > 0.0 {
            support.extend_from_slice(features.row(i));
            sv_alphas.push(alphas[i]);
            sv_labels.push(signs[i]);
        }
    }
    Ok(SvmModel {
        kernel,
        arity: features.n_cols(),
        support,
        alphas: sv_alphas,
        labels: sv_labels,
        bias: b,
    })
}

/// SVM behind the uniform classifier contract: maps the two observed class
/// indices onto -1/+1 and predicts class indices back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmClassifierModel {
    svm: SvmModel,
    negative_class: usize,
    positive_class: usize,
}

impl SvmClassifierModel {
    pub fn feature_arity(&self) -> usize {
        self.svm.feature_arity()
    }

    pub fn decision_value(&self, row: &[f64]) -> f64 {
        self.svm.decision_value(row)
    }

    pub fn inner(&self) -> &SvmModel {
        &self.svm
    }

    pub fn predict(&self, row: &[f64]) -> usize {
        if self.svm.predict_sign(row) >= 0.0 {
            self.positive_class
        } else {
            self.negative_class
        }
    }
}

pub(super) fn train_svm_classifier(
    features: &FeatureMatrix,
    targets: &TargetVector,
    config: &SvmConfig,
) -> Result<super::TrainedModel, ModelError> {
    let TargetVector::Classes { labels, .. } = targets else {
        return Err(ModelError::TaskMismatch(
            "SVM needs a nominal target; wrap regression elsewhere".into(),
        ));
    };
    let mut distinct: Vec<usize> = labels.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() != 2 {
        return Err(ModelError::NotBinary(distinct.len()));
    }
    let (negative_class, positive_class) = (distinct[0], distinct[1]);
    let signs: Vec<f64> = labels
        .iter()
        .map(|&l| if l == positive_class { 1.0 } else { -1.0 })
        .collect();
    let svm = train(features, &signs, config)?;
    Ok(super::TrainedModel::Svm(SvmClassifierModel {
        svm,
        negative_class,
        positive_class,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(kernel: SvmKernel, c: f64) -> SvmConfig {
        SvmConfig {
            kernel,
            c,
            tolerance: 1e-3,
            max_passes: 20,
            seed: 1,
        }
    }

    #[test]
    fn symmetric_pair_puts_the_boundary_at_zero() {
        let m = FeatureMatrix::from_rows(vec![vec![-1.0], vec![1.0]]);
        let model = train(&m, &[-1.0, 1.0], &config(SvmKernel::Linear, 1.0)).unwrap();
        assert_eq!(model.predict_sign(&[-1.0]), -1.0);
        assert_eq!(model.predict_sign(&[1.0]), 1.0);
        assert!(model.decision_value(&[0.0]).abs() < 1e-9);
        // the analytic solution puts alpha = 0.5 on both points with b = 0
        assert_eq!(model.n_support(), 2);
        for &a in model.alphas() {
            assert!((a - 0.5).abs() < 1e-9);
        }
        assert!(model.bias().abs() < 1e-9);
    }

    #[test]
    fn xor_with_rbf_kernel_fits_the_training_set() {
        let m = FeatureMatrix::from_rows(vec![
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
        ]);
        let y = [-1.0, -1.0, 1.0, 1.0];
        let model = train(
            &m,
            &y,
            &config(SvmKernel::Rbf { gamma: Some(1.0) }, 10.0),
        )
        .unwrap();
        for (i, &label) in y.iter().enumerate() {
            assert_eq!(model.predict_sign(m.row(i)), label, "point {i}");
        }
        // the symmetric dual has the closed form alpha* = 4 / S with
        // S = 4 + 4e^-2 - 8e^-1, interior to the box at C = 10
        let s = 4.0 + 4.0 * (-2.0_f64).exp() - 8.0 * (-1.0_f64).exp();
        let alpha_star = 4.0 / s;
        assert!((alpha_star - 2.502650301077118).abs() < 1e-12);
        assert_eq!(model.n_support(), 4);
        for &a in model.alphas() {
            assert!((a - alpha_star).abs() < 0.05, "alpha {a} vs {alpha_star}");
        }
    }

    #[test]
    fn dual_constraints_hold_after_training() {
        let m = FeatureMatrix::from_rows(vec![
            vec![-2.0, 0.3],
            vec![-1.5, -0.2],
            vec![-1.0, 0.1],
            vec![1.0, -0.4],
            vec![1.5, 0.2],
            vec![2.0, 0.0],
        ]);
        let y = [-1.0, -1.0, -1.0, 1.0, 1.0, 1.0];
        let cfg = SvmConfig {
            max_passes: 50,
            ..config(SvmKernel::Linear, 1.0)
        };
        let model = train(&m, &y, &cfg).unwrap();

        // box constraint and the equality constraint sum alpha_i y_i = 0
        let mut sum = 0.0;
        for (&a, &l) in model.alphas().iter().zip(model.support_labels()) {
            assert!(a > 0.0 && a <= cfg.c + 1e-12);
            sum += a * l;
        }
        assert!(sum.abs() < 1e-6);

        // KKT conditions within tolerance for every training point
        for (i, &label) in y.iter().enumerate() {
            let margin = label * model.decision_value(m.row(i));
            // reconstruct this row's alpha (0 when it is not a support vector)
            let alpha = model
                .alphas()
                .iter()
                .zip(0..)
                .find(|&(_, k)| {
                    let sv = &model.support[k * 2..k * 2 + 2];
                    sv == m.row(i)
                })
                .map(|(&a, _)| a)
                .unwrap_or(0.0);
            if alpha == 0.0 {
                assert!(margin >= 1.0 - 2.0 * cfg.tolerance, "row {i}: {margin}");
            } else if alpha < cfg.c {
                assert!((margin - 1.0).abs() <= 2.0 * cfg.tolerance, "row {i}: {margin}");
            } else {
                assert!(margin <= 1.0 + 2.0 * cfg.tolerance, "row {i}: {margin}");
            }
        }
    }

    #[test]
    fn single_class_input_is_rejected() {
        let m = FeatureMatrix::from_rows(vec![vec![0.0], vec![1.0]]);
        let err = train(&m, &[1.0, 1.0], &config(SvmKernel::Linear, 1.0)).unwrap_err();
        assert_eq!(err, ModelError::NotBinary(1));
    }

    #[test]
    fn training_is_deterministic_per_seed() {
        let m = FeatureMatrix::from_rows(
            (0..20)
                .map(|i| vec![(i as f64) / 3.0, ((i * 7) % 5) as f64])
                .collect(),
        );
        let y: Vec<f64> = (0..20).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let cfg = config(SvmKernel::Rbf { gamma: None }, 2.0);
        let a = train(&m, &y, &cfg).unwrap();
        let b = train(&m, &y, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn classifier_wrapper_maps_class_indices() {
        let m = FeatureMatrix::from_rows(vec![vec![-1.0], vec![-0.8], vec![0.9], vec![1.0]]);
        let targets = TargetVector::Classes {
            labels: vec![3, 3, 7, 7],
            class_count: 9,
        };
        let model =
            train_svm_classifier(&m, &targets, &config(SvmKernel::Linear, 1.0)).unwrap();
        assert_eq!(
            model.predict(&[-0.9]).unwrap(),
            super::super::Prediction::Class(3)
        );
        assert_eq!(
            model.predict(&[0.95]).unwrap(),
            super::super::Prediction::Class(7)
        );
    }
}
