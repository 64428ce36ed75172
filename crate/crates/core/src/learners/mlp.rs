//! One-hidden-layer perceptron: sigmoid hidden units, softmax/cross-entropy
//! head for classification, linear/squared-loss head for regression. Trained
//! with seeded mini-batch gradient descent; identical seeds give identical
//! weights.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{MlpConfig, Prediction, Task};
use crate::dataset::{FeatureMatrix, TargetVector};
use crate::error::ModelError;
use crate::rng::substream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    n_in: usize,
    n_hidden: usize,
    n_out: usize,
    task: Task,
    /// Row-major `n_hidden x n_in`.
    w1: Vec<f64>,
    b1: Vec<f64>,
    /// Row-major `n_out x n_hidden`.
    w2: Vec<f64>,
    b2: Vec<f64>,
}

impl MlpModel {
    pub fn task(&self) -> Task {
        self.task
    }

    pub fn feature_arity(&self) -> usize {
        self.n_in
    }

    fn hidden(&self, row: &[f64]) -> Vec<f64> {
        (0..self.n_hidden)
            .map(|h| {
                let z = self.b1[h]
                    + self.w1[h * self.n_in..(h + 1) * self.n_in]
                        .iter()
                        .zip(row)
                        .map(|(w, x)| w * x)
                        .sum::<f64>();
                sigmoid(z)
            })
            .collect()
    }

    fn outputs(&self, row: &[f64]) -> Vec<f64> {
        let a1 = self.hidden(row);
        (0..self.n_out)
            .map(|k| {
                self.b2[k]
                    + self.w2[k * self.n_hidden..(k + 1) * self.n_hidden]
                        .iter()
                        .zip(&a1)
                        .map(|(w, a)| w * a)
                        .sum::<f64>()
            })
            .collect()
    }

    /// Class probabilities (classification only).
    pub fn probabilities(&self, row: &[f64]) -> Vec<f64> {
        softmax(&self.outputs(row))
    }

    pub fn predict(&self, row: &[f64]) -> Prediction {
        match self.task {
            Task::Classification => {
                let z = self.outputs(row);
                // argmax with ties toward the lowest class index
                let mut best = 0;
                for k in 1..z.len() {
                    if z[k] > z[best] {
                        best = k;
                    }
                }
                Prediction::Class(best)
            }
            Task::Regression => Prediction::Real(self.outputs(row)[0]),
        }
    }

    /// p(class 1) - p(class 0) for two-class models.
    pub fn binary_margin(&self, row: &[f64]) -> Result<f64, ModelError> {
        if self.task != Task::Classification || self.n_out != 2 {
            return Err(ModelError::TaskMismatch(
                "binary margin needs a two-class classifier".into(),
            ));
        }
        let p = self.probabilities(row);
        Ok(p[1] - p[0])
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

enum Target<'a> {
    Classes(&'a [usize]),
    Reals(&'a [f64]),
}

#[derive(Debug, Clone)]
pub(crate) struct Gradients {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

/// Mean loss over the batch: cross-entropy or half squared error.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn batch_loss(model: &MlpModel, features: &FeatureMatrix, targets: &TargetVector, rows: &[usize]) -> f64 {
    let mut total = 0.0;
    for &r in rows {
        let out = model.outputs(features.row(r));
        total += match targets {
            TargetVector::Classes { labels, .. } => {
                let p = softmax(&out);
                -(p[labels[r]].max(1e-300)).ln()
            }
            TargetVector::Reals(y) => 0.5 * (out[0] - y[r]).powi(2),
        };
    }
    total / rows.len() as f64
}

/// Mean analytic gradients over the batch; the training loop and the
/// finite-difference check both go through here.
pub(crate) fn batch_gradients(
    model: &MlpModel,
    features: &FeatureMatrix,
    targets: &TargetVector,
    rows: &[usize],
) -> Gradients {
    let (n_in, n_hidden, n_out) = (model.n_in, model.n_hidden, model.n_out);
    let mut g = Gradients {
        w1: vec![0.0; n_hidden * n_in],
        b1: vec![0.0; n_hidden],
        w2: vec![0.0; n_out * n_hidden],
        b2: vec![0.0; n_out],
    };
    let target = match targets {
        TargetVector::Classes { labels, .. } => Target::Classes(labels),
        TargetVector::Reals(y) => Target::Reals(y),
    };
    let scale = 1.0 / rows.len() as f64;
    for &r in rows {
        let x = features.row(r);
        let a1 = model.hidden(x);
        let z2: Vec<f64> = (0..n_out)
            .map(|k| {
                model.b2[k]
                    + model.w2[k * n_hidden..(k + 1) * n_hidden]
                        .iter()
                        .zip(&a1)
                        .map(|(w, a)| w * a)
                        .sum::<f64>()
            })
            .collect();
        let dz2: Vec<f64> = match &target {
            Target::Classes(labels) => {
                let mut p = softmax(&z2);
                p[labels[r]] -= 1.0;
                p
            }
            Target::Reals(y) => vec![z2[0] - y[r]],
        };
        for k in 0..n_out {
            g.b2[k] += scale * dz2[k];
            for h in 0..n_hidden {
                g.w2[k * n_hidden + h] += scale * dz2[k] * a1[h];
            }
        }
        for h in 0..n_hidden {
            let da1: f64 = (0..n_out).map(|k| model.w2[k * n_hidden + h] * dz2[k]).sum();
            let dz1 = da1 * a1[h] * (1.0 - a1[h]);
            g.b1[h] += scale * dz1;
            for (i, &xi) in x.iter().enumerate() {
                g.w1[h * n_in + i] += scale * dz1 * xi;
            }
        }
    }
    g
}

pub(super) fn train(
    features: &FeatureMatrix,
    targets: &TargetVector,
    config: &MlpConfig,
) -> Result<MlpModel, ModelError> {
    super::check_nonempty(features, targets)?;
    if config.hidden_units == 0 || config.batch_size == 0 {
        return Err(ModelError::InvalidConfig(
            "hidden_units and batch_size must be at least 1".into(),
        ));
    }
    if !(config.learning_rate > 0.0) {
        return Err(ModelError::InvalidConfig(
            "learning rate must be positive".into(),
        ));
    }
    let n_in = features.n_cols();
    let n_hidden = config.hidden_units;
    let (task, n_out) = match targets {
        TargetVector::Classes { class_count, .. } => (Task::Classification, (*class_count).max(1)),
        TargetVector::Reals(_) => (Task::Regression, 1),
    };

    let mut rng = substream(config.seed, 0);
    let mut init = |fan_in: usize, fan_out: usize, len: usize| -> Vec<f64> {
        let r = (6.0 / (fan_in + fan_out) as f64).sqrt();
        (0..len).map(|_| rng.random_range(-r..=r)).collect()
    };
    let mut model = MlpModel {
        n_in,
        n_hidden,
        n_out,
        task,
        w1: init(n_in, n_hidden, n_hidden * n_in),
        b1: vec![0.0; n_hidden],
        w2: init(n_hidden, n_out, n_out * n_hidden),
        b2: vec![0.0; n_out],
    };

    let mut order: Vec<usize> = (0..features.n_rows()).collect();
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            let g = batch_gradients(&model, features, targets, batch);
            let lr = config.learning_rate;
            for (w, d) in model.w1.iter_mut().zip(&g.w1) {
                *w -= lr * d;
            }
            for (w, d) in model.b1.iter_mut().zip(&g.b1) {
                *w -= lr * d;
            }
            for (w, d) in model.w2.iter_mut().zip(&g.w2) {
                *w -= lr * d;
            }
            for (w, d) in model.b2.iter_mut().zip(&g.b2) {
                *w -= lr * d;
            }
        }
    }

    let finite = model
        .w1
        .iter()
        .chain(&model.b1)
        .chain(&model.w2)
        .chain(&model.b2)
        .all(|w| w.is_finite());
    if !finite {
        return Err(ModelError::InvalidConfig(
            "training diverged to non-finite weights; lower the learning rate".into(),
        ));
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn and_gate() -> (FeatureMatrix, TargetVector) {
        let m = FeatureMatrix::from_rows(vec![
            vec![0.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
        ]);
        let t = TargetVector::Classes {
            labels: vec![0, 0, 0, 1],
            class_count: 2,
        };
        (m, t)
    }

    #[test]
    fn learns_the_and_truth_table() {
        let (m, t) = and_gate();
        let config = MlpConfig {
            hidden_units: 4,
            learning_rate: 0.5,
            epochs: 2000,
            batch_size: 4,
            seed: 3,
        };
        let model = train(&m, &t, &config).unwrap();
        let want = [0, 0, 0, 1];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(model.predict(m.row(i)), Prediction::Class(*w), "row {i}");
        }
    }

    #[test]
    fn zero_epochs_returns_the_seeded_initialization() {
        let (m, t) = and_gate();
        let config = MlpConfig {
            epochs: 0,
            ..MlpConfig::default()
        };
        let a = train(&m, &t, &config).unwrap();
        let b = train(&m, &t, &config).unwrap();
        assert_eq!(a, b);
        let other = train(
            &m,
            &t,
            &MlpConfig {
                seed: 9,
                epochs: 0,
                ..MlpConfig::default()
            },
        )
        .unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn loss_stays_finite_across_epochs() {
        let (m, t) = and_gate();
        let rows: Vec<usize> = (0..4).collect();
        for epochs in [0, 1, 2, 5, 25, 100] {
            let model = train(
                &m,
                &t,
                &MlpConfig {
                    hidden_units: 4,
                    learning_rate: 0.5,
                    epochs,
                    batch_size: 2,
                    seed: 3,
                },
            )
            .unwrap();
            let loss = batch_loss(&model, &m, &t, &rows);
            assert!(loss.is_finite(), "epochs {epochs}: loss {loss}");
        }
    }

    #[test]
    fn gradients_match_central_finite_differences() {
        // 5-row random instance, checked weight by weight
        let mut rng = substream(11, 0);
        let rows: Vec<Vec<f64>> = (0..5)
            .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let m = FeatureMatrix::from_rows(rows);
        let class_t = TargetVector::Classes {
            labels: vec![0, 2, 1, 2, 0],
            class_count: 3,
        };
        let real_t = TargetVector::Reals(vec![0.3, -1.2, 0.8, 2.0, -0.5]);

        for targets in [class_t, real_t] {
            let model = train(
                &m,
                &targets,
                &MlpConfig {
                    hidden_units: 4,
                    learning_rate: 0.1,
                    epochs: 3,
                    batch_size: 5,
                    seed: 7,
                },
            )
            .unwrap();
            let all: Vec<usize> = (0..5).collect();
            let analytic = batch_gradients(&model, &m, &targets, &all);

            let h = 1e-5;
            let check = |get: &dyn Fn(&MlpModel) -> Vec<f64>,
                             set: &dyn Fn(&mut MlpModel, usize, f64),
                             grads: &[f64]| {
                for (idx, &a) in grads.iter().enumerate() {
                    let base = get(&model)[idx];
                    let mut plus = model.clone();
                    set(&mut plus, idx, base + h);
                    let mut minus = model.clone();
                    set(&mut minus, idx, base - h);
                    let numeric = (batch_loss(&plus, &m, &targets, &all)
                        - batch_loss(&minus, &m, &targets, &all))
                        / (2.0 * h);
                    let denom = a.abs().max(numeric.abs()).max(1e-6);
                    assert!(
                        (a - numeric).abs() / denom < 1e-4,
                        "weight {idx}: analytic {a} vs numeric {numeric}"
                    );
                }
            };
            check(&|m| m.w1.clone(), &|m, i, v| m.w1[i] = v, &analytic.w1);
            check(&|m| m.b1.clone(), &|m, i, v| m.b1[i] = v, &analytic.b1);
            check(&|m| m.w2.clone(), &|m, i, v| m.w2[i] = v, &analytic.w2);
            check(&|m| m.b2.clone(), &|m, i, v| m.b2[i] = v, &analytic.b2);
        }
    }

    #[test]
    fn regression_head_fits_a_line() {
        let m = FeatureMatrix::from_rows((0..16).map(|i| vec![i as f64 / 8.0 - 1.0]).collect());
        let y: Vec<f64> = (0..16).map(|i| 0.5 * (i as f64 / 8.0 - 1.0) + 0.2).collect();
        let t = TargetVector::Reals(y.clone());
        let model = train(
            &m,
            &t,
            &MlpConfig {
                hidden_units: 8,
                learning_rate: 0.2,
                epochs: 1500,
                batch_size: 16,
                seed: 5,
            },
        )
        .unwrap();
        for (i, v) in y.iter().enumerate() {
            let p = model.predict(m.row(i)).as_real().unwrap();
            assert!((p - v).abs() < 0.05, "row {i}: {p} vs {v}");
        }
    }
}
