//! Confusion matrices and the classification/regression metric suites.
//!
//! Ratios with a zero denominator are reported as absent (`None`), rendered
//! as `?` in text and `null` in JSON. Weighted averages are absent whenever
//! any class with support contributes an absent value.

use serde::{Deserialize, Serialize};

use crate::error::EvalError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    classes: Vec<String>,
    /// `counts[truth][predicted]`.
    counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn zeroed(classes: Vec<String>) -> Self {
        let k = classes.len();
        ConfusionMatrix {
            classes,
            counts: vec![vec![0; k]; k],
        }
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn counts(&self) -> &Vec<Vec<usize>> {
        &self.counts
    }

    pub fn count(&self, truth: usize, predicted: usize) -> usize {
        self.counts[truth][predicted]
    }

    pub fn add(&mut self, truth: usize, predicted: usize) -> Result<(), EvalError> {
        let k = self.classes.len();
        if truth >= k {
            return Err(EvalError::UnknownLabel(truth));
        }
        if predicted >= k {
            return Err(EvalError::UnknownLabel(predicted));
        }
        self.counts[truth][predicted] += 1;
        Ok(())
    }

    pub fn total(&self) -> usize {
        self.counts.iter().map(|r| r.iter().sum::<usize>()).sum()
    }

    pub fn diagonal(&self) -> usize {
        (0..self.classes.len()).map(|i| self.counts[i][i]).sum()
    }

    /// Row sum: instances whose true class is `c`.
    pub fn support(&self, c: usize) -> usize {
        self.counts[c].iter().sum()
    }

    /// Column sum: instances predicted as `c`.
    pub fn predicted(&self, c: usize) -> usize {
        self.counts.iter().map(|row| row[c]).sum()
    }
}

/// Builds the matrix from parallel truth/prediction label vectors.
pub fn confusion_matrix(
    truth: &[usize],
    predicted: &[usize],
    classes: &[String],
) -> Result<ConfusionMatrix, EvalError> {
    if truth.len() != predicted.len() {
        return Err(EvalError::LengthMismatch {
            truth: truth.len(),
            predicted: predicted.len(),
        });
    }
    let mut matrix = ConfusionMatrix::zeroed(classes.to_vec());
    for (&t, &p) in truth.iter().zip(predicted) {
        matrix.add(t, p)?;
    }
    Ok(matrix)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: String,
    pub support: usize,
    /// TP / (TP + FN); equals recall. Absent when the class has no support.
    pub tp_rate: Option<f64>,
    /// FP / (FP + TN). Absent when nothing is outside the class.
    pub fp_rate: Option<f64>,
    /// TP / (TP + FP). Absent when nothing was predicted as the class.
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    /// Harmonic mean of precision and recall; absent when either is absent
    /// or both are zero.
    pub f_measure: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedMetrics {
    pub tp_rate: Option<f64>,
    pub fp_rate: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f_measure: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub correctly_classified: usize,
    pub incorrectly_classified: usize,
    pub total: usize,
    pub accuracy: f64,
    /// Cohen's kappa from the pooled marginals; absent when expected
    /// agreement is already 1.
    pub kappa: Option<f64>,
    pub per_class: Vec<ClassMetrics>,
    pub weighted: WeightedMetrics,
}

/// Derives the per-class one-vs-rest metric suite from a confusion matrix.
pub fn classification_report(matrix: &ConfusionMatrix) -> Result<ClassificationReport, EvalError> {
    let total = matrix.total();
    if total == 0 {
        return Err(EvalError::EmptyInput("empty confusion matrix".into()));
    }
    let k = matrix.classes().len();
    let correct = matrix.diagonal();
    let accuracy = correct as f64 / total as f64;

    let mut per_class = Vec::with_capacity(k);
    for c in 0..k {
        let tp = matrix.count(c, c);
        let support = matrix.support(c);
        let predicted = matrix.predicted(c);
        let fp = predicted - tp;
        let fn_ = support - tp;
        let tn = total - tp - fp - fn_;

        let recall = ratio(tp, tp + fn_);
        let precision = ratio(tp, tp + fp);
        let fp_rate = ratio(fp, fp + tn);
        let f_measure = match (precision, recall) {
            (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
            _ => None,
        };
        per_class.push(ClassMetrics {
            class: matrix.classes()[c].clone(),
            support,
            tp_rate: recall,
            fp_rate,
            precision,
            recall,
            f_measure,
        });
    }

    let weighted = WeightedMetrics {
        tp_rate: weighted_average(&per_class, total, |m| m.tp_rate),
        fp_rate: weighted_average(&per_class, total, |m| m.fp_rate),
        precision: weighted_average(&per_class, total, |m| m.precision),
        recall: weighted_average(&per_class, total, |m| m.recall),
        f_measure: weighted_average(&per_class, total, |m| m.f_measure),
    };

    // expected agreement from row/column marginals
    let pe = (0..k)
        .map(|c| matrix.support(c) as f64 * matrix.predicted(c) as f64)
        .sum::<f64>()
        / (total as f64 * total as f64);
    let kappa = if pe < 1.0 {
        Some((accuracy - pe) / (1.0 - pe))
    } else {
        None
    };

    Ok(ClassificationReport {
        correctly_classified: correct,
        incorrectly_classified: total - correct,
        total,
        accuracy,
        kappa,
        per_class,
        weighted,
    })
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    if den == 0 {
        None
    } else {
        Some(num as f64 / den as f64)
    }
}

/// Support-weighted mean of a per-class metric; absent when any class that
/// actually carries weight has an absent value.
fn weighted_average(
    per_class: &[ClassMetrics],
    total: usize,
    get: impl Fn(&ClassMetrics) -> Option<f64>,
) -> Option<f64> {
    let mut sum = 0.0;
    for m in per_class {
        if m.support == 0 {
            continue;
        }
        sum += get(m)? * m.support as f64;
    }
    Some(sum / total as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionReport {
    pub rmse: f64,
    pub mae: f64,
    /// 100 x total absolute error relative to the mean predictor; absent for
    /// a constant truth vector.
    pub rae_percent: Option<f64>,
    /// 100 x root squared error relative to the mean predictor; absent for a
    /// constant truth vector.
    pub rrse_percent: Option<f64>,
    /// Pearson correlation; absent when either side is constant.
    pub correlation: Option<f64>,
    pub total: usize,
}

pub fn regression_report(truth: &[f64], predicted: &[f64]) -> Result<RegressionReport, EvalError> {
    if truth.len() != predicted.len() {
        return Err(EvalError::LengthMismatch {
            truth: truth.len(),
            predicted: predicted.len(),
        });
    }
    let n = truth.len();
    if n == 0 {
        return Err(EvalError::EmptyInput("no predictions to score".into()));
    }
    let nf = n as f64;
    let mean_truth = truth.iter().sum::<f64>() / nf;

    let mut abs_err = 0.0;
    let mut sq_err = 0.0;
    let mut abs_dev = 0.0;
    let mut sq_dev = 0.0;
    for (&y, &p) in truth.iter().zip(predicted) {
        abs_err += (p - y).abs();
        sq_err += (p - y) * (p - y);
        abs_dev += (y - mean_truth).abs();
        sq_dev += (y - mean_truth) * (y - mean_truth);
    }

    let rmse = (sq_err / nf).sqrt();
    let mae = abs_err / nf;
    let rae_percent = (abs_dev > 0.0).then(|| 100.0 * abs_err / abs_dev);
    let rrse_percent = (sq_dev > 0.0).then(|| 100.0 * (sq_err / sq_dev).sqrt());

    let mean_pred = predicted.iter().sum::<f64>() / nf;
    let mut cov = 0.0;
    let mut var_pred = 0.0;
    for (&y, &p) in truth.iter().zip(predicted) {
        cov += (y - mean_truth) * (p - mean_pred);
        var_pred += (p - mean_pred) * (p - mean_pred);
    }
    let correlation = (sq_dev > 0.0 && var_pred > 0.0)
        .then(|| cov / (sq_dev.sqrt() * var_pred.sqrt()));

    Ok(RegressionReport {
        rmse,
        mae,
        rae_percent,
        rrse_percent,
        correlation,
        total: n,
    })
}
