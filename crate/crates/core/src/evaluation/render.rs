//! Plain-text report rendering in the classic evaluation-output layout:
//! summary counters, a per-class accuracy table, and the confusion matrix
//! block. Absent metrics print as `?`.

use super::{ClassificationReport, ConfusionMatrix, RegressionReport};

pub fn render_classification(report: &ClassificationReport, matrix: &ConfusionMatrix) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "Correctly Classified Instances   {:>10}    {:>9.4} %\n",
        report.correctly_classified,
        100.0 * report.accuracy
    ));
    out.push_str(&format!(
        "Incorrectly Classified Instances {:>10}    {:>9.4} %\n",
        report.incorrectly_classified,
        100.0 * (1.0 - report.accuracy)
    ));
    out.push_str(&format!(
        "Kappa statistic                  {:>10}\n",
        opt4(report.kappa)
    ));
    out.push_str(&format!(
        "Total Number of Instances        {:>10}\n",
        report.total
    ));

    out.push_str("\n=== Detailed Accuracy By Class ===\n\n");
    out.push_str(
        "                 TP Rate  FP Rate  Precision  Recall  F-Measure  Class\n",
    );
    for c in &report.per_class {
        out.push_str(&format!(
            "                 {:<7}  {:<7}  {:<9}  {:<6}  {:<9}  {}\n",
            opt3(c.tp_rate),
            opt3(c.fp_rate),
            opt3(c.precision),
            opt3(c.recall),
            opt3(c.f_measure),
            c.class
        ));
    }
    let w = &report.weighted;
    out.push_str(&format!(
        "Weighted Avg.    {:<7}  {:<7}  {:<9}  {:<6}  {:<9}\n",
        opt3(w.tp_rate),
        opt3(w.fp_rate),
        opt3(w.precision),
        opt3(w.recall),
        opt3(w.f_measure),
    ));

    out.push_str("\n=== Confusion Matrix ===\n\n");
    let k = matrix.classes().len();
    let width = matrix
        .counts()
        .iter()
        .flatten()
        .map(|c| c.to_string().len())
        .max()
        .unwrap_or(1)
        .max(letters(k.saturating_sub(1)).len());
    let header: Vec<String> = (0..k).map(|i| format!("{:>width$}", letters(i))).collect();
    out.push_str(&format!("  {}   <-- classified as\n", header.join(" ")));
    for (i, row) in matrix.counts().iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        out.push_str(&format!(
            "  {} |   {} = {}\n",
            cells.join(" "),
            letters(i),
            matrix.classes()[i]
        ));
    }
    out
}

pub fn render_regression(report: &RegressionReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "Correlation coefficient          {:>12}\n",
        opt4(report.correlation)
    ));
    out.push_str(&format!(
        "Mean absolute error              {:>12.4}\n",
        report.mae
    ));
    out.push_str(&format!(
        "Root mean squared error          {:>12.4}\n",
        report.rmse
    ));
    out.push_str(&format!(
        "Relative absolute error          {:>12} %\n",
        opt4(report.rae_percent)
    ));
    out.push_str(&format!(
        "Root relative squared error      {:>12} %\n",
        opt4(report.rrse_percent)
    ));
    out.push_str(&format!(
        "Total Number of Instances        {:>12}\n",
        report.total
    ));
    out
}

fn opt3(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:.3}"),
        None => "?".to_string(),
    }
}

fn opt4(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:.4}"),
        None => "?".to_string(),
    }
}

/// Spreadsheet-style row letters: a..z, aa, ab, ...
fn letters(mut i: usize) -> String {
    let mut out = String::new();
    loop {
        out.insert(0, (b'a' + (i % 26) as u8) as char);
        if i < 26 {
            break;
        }
        i = i / 26 - 1;
    }
    out
}
