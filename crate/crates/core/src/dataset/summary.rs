//! Per-attribute profiles: kind, distinct/missing counts, value ranges or
//! category frequencies.

use serde::Serialize;

use super::{AttributeKind, Dataset};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetSummary {
    pub relation: String,
    pub row_count: usize,
    pub attributes: Vec<AttributeSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttributeSummary {
    pub name: String,
    pub distinct_count: usize,
    pub missing_count: usize,
    /// 100 * missing_count / row_count; rendered to two decimals.
    pub missing_percentage: f64,
    #[serde(flatten)]
    pub kind: SummaryKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SummaryKind {
    Numeric {
        /// None when the column has no observed cells.
        min: Option<f64>,
        max: Option<f64>,
        mean: Option<f64>,
        stddev: Option<f64>,
    },
    Nominal {
        /// (category, observed count) in declaration order.
        frequencies: Vec<(String, usize)>,
    },
}

pub fn summarize(dataset: &Dataset) -> DatasetSummary {
    let n = dataset.n_rows();
    let attributes = dataset
        .attributes()
        .iter()
        .enumerate()
        .map(|(a, attr)| {
            let missing_count = dataset.missing_count(a);
            let missing_percentage = if n == 0 {
                0.0
            } else {
                100.0 * missing_count as f64 / n as f64
            };
            let (distinct_count, kind) = match &attr.kind {
                AttributeKind::Numeric => {
                    let observed: Vec<f64> = dataset
                        .rows()
                        .iter()
                        .filter_map(|row| row[a].as_numeric())
                        .collect();
                    let mut bits: Vec<u64> = observed.iter().map(|v| v.to_bits()).collect();
                    bits.sort_unstable();
                    bits.dedup();
                    let stats = if observed.is_empty() {
                        SummaryKind::Numeric {
                            min: None,
                            max: None,
                            mean: None,
                            stddev: None,
                        }
                    } else {
                        let mean = observed.iter().sum::<f64>() / observed.len() as f64;
                        let var = observed.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                            / observed.len() as f64;
                        SummaryKind::Numeric {
                            min: observed.iter().copied().reduce(f64::min),
                            max: observed.iter().copied().reduce(f64::max),
                            mean: Some(mean),
                            stddev: Some(var.sqrt()),
                        }
                    };
                    (bits.len(), stats)
                }
                AttributeKind::Nominal(cats) => {
                    let mut counts = vec![0usize; cats.len()];
                    for row in dataset.rows() {
                        if let Some(i) = row[a].as_nominal() {
                            counts[i] += 1;
                        }
                    }
                    let distinct = counts.iter().filter(|&&c| c > 0).count();
                    let frequencies = cats
                        .iter()
                        .cloned()
                        .zip(counts.iter().copied())
                        .collect();
                    (distinct, SummaryKind::Nominal { frequencies })
                }
            };
            AttributeSummary {
                name: attr.name.clone(),
                distinct_count,
                missing_count,
                missing_percentage,
                kind,
            }
        })
        .collect();
    DatasetSummary {
        relation: dataset.relation().to_string(),
        row_count: n,
        attributes,
    }
}

impl DatasetSummary {
    /// Plain-text table: one row per attribute with kind, distinct/missing
    /// counts, missing percentage, and a short description of the values.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "Relation: {}  ({} rows, {} attributes)\n\n",
            self.relation,
            self.row_count,
            self.attributes.len()
        ));
        let name_width = self
            .attributes
            .iter()
            .map(|a| a.name.len())
            .max()
            .unwrap_or(4)
            .max(9);
        out.push_str(&format!(
            "{:<name_width$}  {:<8}  {:>8}  {:>8}  {:>8}  Values\n",
            "Attribute", "Type", "Distinct", "Missing", "Miss%"
        ));
        for a in &self.attributes {
            let (type_name, describe) = match &a.kind {
                SummaryKind::Numeric {
                    min,
                    max,
                    mean,
                    stddev,
                } => {
                    let desc = match (min, max, mean, stddev) {
                        (Some(lo), Some(hi), Some(m), Some(s)) => format!(
                            "range {}..{}; mean {:.4}; stddev {:.4}",
                            format_num(*lo),
                            format_num(*hi),
                            m,
                            s
                        ),
                        _ => "(no observed values)".to_string(),
                    };
                    ("numeric", desc)
                }
                SummaryKind::Nominal { frequencies } => {
                    let desc = frequencies
                        .iter()
                        .map(|(c, n)| format!("{c}: {n}"))
                        .collect::<Vec<_>>()
                        .join(", ");
                    ("nominal", desc)
                }
            };
            out.push_str(&format!(
                "{:<name_width$}  {:<8}  {:>8}  {:>8}  {:>7.2}%  {}\n",
                a.name, type_name, a.distinct_count, a.missing_count, a.missing_percentage, describe
            ));
        }
        out
    }
}

fn format_num(v: f64) -> String {
    format!("{v}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Attribute, Value};

    #[test]
    fn missing_percentage_reproduces_exact_counts() {
        // 819 rows, 162 missing: the percentage times row_count/100 recovers
        // the integer count
        let rows: Vec<Vec<Value>> = (0..819)
            .map(|i| {
                vec![if i < 162 {
                    Value::Missing
                } else {
                    Value::Numeric(i as f64)
                }]
            })
            .collect();
        let d = Dataset::new("t", vec![Attribute::numeric("Aspirin")], rows, None).unwrap();
        let s = d.summarize();
        let a = &s.attributes[0];
        assert_eq!(a.missing_count, 162);
        let recovered = a.missing_percentage * 819.0 / 100.0;
        assert!((recovered - 162.0).abs() < 1e-9);
        assert_eq!(recovered.round() as usize, 162);
        assert_eq!(format!("{:.2}", a.missing_percentage), "19.78");
    }

    #[test]
    fn no_missing_means_zero_percent() {
        let d = Dataset::new(
            "t",
            vec![Attribute::numeric("x")],
            vec![vec![Value::Numeric(1.0)], vec![Value::Numeric(2.0)]],
            None,
        )
        .unwrap();
        let s = d.summarize();
        assert_eq!(s.attributes[0].missing_percentage, 0.0);
        assert_eq!(s.attributes[0].missing_count, 0);
    }

    #[test]
    fn numeric_range_and_mean() {
        let d = Dataset::new(
            "t",
            vec![Attribute::numeric("x")],
            vec![
                vec![Value::Numeric(1.0)],
                vec![Value::Numeric(2.0)],
                vec![Value::Numeric(3.0)],
            ],
            None,
        )
        .unwrap();
        let s = d.summarize();
        match &s.attributes[0].kind {
            SummaryKind::Numeric { min, max, mean, .. } => {
                assert_eq!(*min, Some(1.0));
                assert_eq!(*max, Some(3.0));
                assert_eq!(*mean, Some(2.0));
            }
            _ => panic!("expected numeric summary"),
        }
        assert_eq!(s.attributes[0].distinct_count, 3);
    }

    #[test]
    fn nominal_frequencies_in_declaration_order() {
        let d = Dataset::new(
            "t",
            vec![Attribute::nominal("c", vec!["yes".into(), "no".into()])],
            vec![
                vec![Value::Nominal(1)],
                vec![Value::Nominal(1)],
                vec![Value::Missing],
                vec![Value::Nominal(0)],
            ],
            None,
        )
        .unwrap();
        let s = d.summarize();
        match &s.attributes[0].kind {
            SummaryKind::Nominal { frequencies } => {
                assert_eq!(
                    frequencies,
                    &vec![("yes".to_string(), 1), ("no".to_string(), 2)]
                );
            }
            _ => panic!("expected nominal summary"),
        }
        assert_eq!(s.attributes[0].distinct_count, 2);
        assert_eq!(s.attributes[0].missing_count, 1);
    }

    #[test]
    fn text_rendering_mentions_each_attribute() {
        let d = Dataset::new(
            "rel",
            vec![
                Attribute::numeric("x"),
                Attribute::nominal("c", vec!["a".into()]),
            ],
            vec![vec![Value::Numeric(1.0), Value::Nominal(0)]],
            None,
        )
        .unwrap();
        let text = d.summarize().to_text();
        assert!(text.contains("rel"));
        assert!(text.contains('x'));
        assert!(text.contains('c'));
        assert!(text.contains("numeric"));
        assert!(text.contains("nominal"));
    }
}
