//! Numeric encoding of mixed-type rows for the learners.
//!
//! Nominal predictors become one-hot indicator groups; numeric predictors are
//! optionally standardized. Missing predictor cells are filled with the
//! column mean (numeric) or mode (nominal) learned from the fit rows, so a
//! missing nominal cell still produces a valid indicator. Fitting on training
//! rows and transforming test rows keeps every statistic leakage-free.

use super::{AttributeKind, Dataset};
use crate::error::DataError;

/// Row-major real matrix plus per-column provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    data: Vec<f64>,
    n_rows: usize,
    n_cols: usize,
    columns: Vec<ColumnDescriptor>,
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.n_cols..(r + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n_cols.max(1))
    }

    pub fn columns(&self) -> &[ColumnDescriptor] {
        &self.columns
    }

    /// Builds a matrix directly from already-numeric rows. Columns get
    /// synthetic descriptors; mainly useful in tests and small tools.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == n_cols), "ragged rows");
        let columns = (0..n_cols)
            .map(|i| ColumnDescriptor {
                attribute: i,
                role: ColumnRole::Numeric {
                    standardization: None,
                    constant: false,
                },
            })
            .collect();
        FeatureMatrix {
            data: rows.into_iter().flatten().collect(),
            n_rows,
            n_cols,
            columns,
        }
    }
}

/// Maps a matrix column back to its source attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnDescriptor {
    pub attribute: usize,
    pub role: ColumnRole,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnRole {
    /// A numeric attribute column; `standardization` holds the training
    /// (mean, stddev) when standardization was applied. `constant` marks
    /// columns with no observed spread in the fit rows (including columns
    /// with no observed cells at all, whose fill value is defined as 0).
    Numeric {
        standardization: Option<(f64, f64)>,
        constant: bool,
    },
    /// One indicator of a nominal attribute's one-hot group.
    Indicator { category: usize },
}

/// Target column extracted alongside the features.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetVector {
    /// Category indices into the target attribute's list.
    Classes { labels: Vec<usize>, class_count: usize },
    Reals(Vec<f64>),
}

impl TargetVector {
    pub fn len(&self) -> usize {
        match self {
            TargetVector::Classes { labels, .. } => labels.len(),
            TargetVector::Reals(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
enum AttrEncoding {
    Numeric {
        attr: usize,
        fill: f64,
        mean: f64,
        stddev: f64,
        constant: bool,
    },
    Nominal {
        attr: usize,
        fill: usize,
        n_categories: usize,
    },
}

/// Fitted encoding statistics: learned on one row set, applicable to another.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureEncoder {
    target: usize,
    standardize: bool,
    encodings: Vec<AttrEncoding>,
    n_cols: usize,
}

impl FeatureEncoder {
    /// Learns fill values and standardization statistics from `rows`
    /// (typically the training rows), excluding the target attribute.
    pub fn fit(
        dataset: &Dataset,
        target: usize,
        rows: &[usize],
        standardize: bool,
    ) -> Result<Self, DataError> {
        if target >= dataset.n_attributes() {
            return Err(DataError::AttributeOutOfRange(target));
        }
        if rows.is_empty() {
            return Err(DataError::Empty);
        }
        let mut encodings = Vec::new();
        let mut n_cols = 0;
        for (a, attr) in dataset.attributes().iter().enumerate() {
            if a == target {
                continue;
            }
            match &attr.kind {
                AttributeKind::Numeric => {
                    let observed: Vec<f64> = rows
                        .iter()
                        .filter_map(|&r| dataset.cell(r, a).as_numeric())
                        .collect();
                    // Mean of an all-missing column is defined as 0 so the
                    // encoding stays total; the constant flag records it.
                    let mean = if observed.is_empty() {
                        0.0
                    } else {
                        observed.iter().sum::<f64>() / observed.len() as f64
                    };
                    let stddev = if observed.is_empty() {
                        0.0
                    } else {
                        (observed.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                            / observed.len() as f64)
                            .sqrt()
                    };
                    encodings.push(AttrEncoding::Numeric {
                        attr: a,
                        fill: mean,
                        mean,
                        stddev,
                        constant: stddev == 0.0,
                    });
                    n_cols += 1;
                }
                AttributeKind::Nominal(cats) => {
                    let mut counts = vec![0usize; cats.len()];
                    for &r in rows {
                        if let Some(i) = dataset.cell(r, a).as_nominal() {
                            counts[i] += 1;
                        }
                    }
                    // Mode with ties toward the lower category index; an
                    // unobserved column falls back to category 0.
                    let fill = counts
                        .iter()
                        .enumerate()
                        .max_by(|(i, x), (j, y)| x.cmp(y).then(j.cmp(i)))
                        .map(|(i, _)| i)
                        .unwrap_or(0);
                    encodings.push(AttrEncoding::Nominal {
                        attr: a,
                        fill,
                        n_categories: cats.len(),
                    });
                    n_cols += cats.len();
                }
            }
        }
        Ok(FeatureEncoder {
            target,
            standardize,
            encodings,
            n_cols,
        })
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// Encodes the given rows with the fitted statistics.
    pub fn transform(&self, dataset: &Dataset, rows: &[usize]) -> FeatureMatrix {
        let mut data = Vec::with_capacity(rows.len() * self.n_cols);
        for &r in rows {
            self.encode_row_into(dataset, r, &mut data);
        }
        FeatureMatrix {
            data,
            n_rows: rows.len(),
            n_cols: self.n_cols,
            columns: self.column_descriptors(),
        }
    }

    /// Encodes a single row (used when predicting cells one at a time).
    pub fn encode_row(&self, dataset: &Dataset, row: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_cols);
        self.encode_row_into(dataset, row, &mut out);
        out
    }

    fn encode_row_into(&self, dataset: &Dataset, row: usize, out: &mut Vec<f64>) {
        for enc in &self.encodings {
            match enc {
                AttrEncoding::Numeric {
                    attr,
                    fill,
                    mean,
                    stddev,
                    ..
                } => {
                    let raw = dataset.cell(row, *attr).as_numeric().unwrap_or(*fill);
                    let v = if self.standardize {
                        if *stddev > 0.0 {
                            (raw - mean) / stddev
                        } else {
                            raw - mean
                        }
                    } else {
                        raw
                    };
                    out.push(v);
                }
                AttrEncoding::Nominal {
                    attr,
                    fill,
                    n_categories,
                } => {
                    let cat = dataset.cell(row, *attr).as_nominal().unwrap_or(*fill);
                    for c in 0..*n_categories {
                        out.push(if c == cat { 1.0 } else { 0.0 });
                    }
                }
            }
        }
    }

    fn column_descriptors(&self) -> Vec<ColumnDescriptor> {
        let mut columns = Vec::with_capacity(self.n_cols);
        for enc in &self.encodings {
            match enc {
                AttrEncoding::Numeric {
                    attr,
                    mean,
                    stddev,
                    constant,
                    ..
                } => columns.push(ColumnDescriptor {
                    attribute: *attr,
                    role: ColumnRole::Numeric {
                        standardization: self.standardize.then_some((*mean, *stddev)),
                        constant: *constant,
                    },
                }),
                AttrEncoding::Nominal {
                    attr, n_categories, ..
                } => {
                    for c in 0..*n_categories {
                        columns.push(ColumnDescriptor {
                            attribute: *attr,
                            role: ColumnRole::Indicator { category: c },
                        });
                    }
                }
            }
        }
        columns
    }

    /// Extracts the target column for `rows`, all of which must have an
    /// observed target cell.
    pub fn targets(&self, dataset: &Dataset, rows: &[usize]) -> Result<TargetVector, DataError> {
        extract_targets(dataset, self.target, rows)
    }
}

/// Pulls the target column out as class indices or reals.
pub fn extract_targets(
    dataset: &Dataset,
    target: usize,
    rows: &[usize],
) -> Result<TargetVector, DataError> {
    let attr = dataset.attribute(target)?;
    match &attr.kind {
        AttributeKind::Nominal(cats) => {
            let mut labels = Vec::with_capacity(rows.len());
            for &r in rows {
                labels.push(dataset.cell(r, target).as_nominal().ok_or_else(|| {
                    DataError::Invalid(format!(
                        "row {r}: target `{}` is missing; filter rows first",
                        attr.name
                    ))
                })?);
            }
            Ok(TargetVector::Classes {
                labels,
                class_count: cats.len(),
            })
        }
        AttributeKind::Numeric => {
            let mut reals = Vec::with_capacity(rows.len());
            for &r in rows {
                reals.push(dataset.cell(r, target).as_numeric().ok_or_else(|| {
                    DataError::Invalid(format!(
                        "row {r}: target `{}` is missing; filter rows first",
                        attr.name
                    ))
                })?);
            }
            Ok(TargetVector::Reals(reals))
        }
    }
}

/// One-shot encoding: fits on every row of `dataset` (all of which must have
/// an observed target) and returns the matrix plus the target vector.
pub fn encode_features(
    dataset: &Dataset,
    target: usize,
    standardize: bool,
) -> Result<(FeatureMatrix, TargetVector), DataError> {
    if dataset.n_rows() == 0 {
        return Err(DataError::Empty);
    }
    let rows: Vec<usize> = (0..dataset.n_rows()).collect();
    let encoder = FeatureEncoder::fit(dataset, target, &rows, standardize)?;
    let targets = encoder.targets(dataset, &rows)?;
    Ok((encoder.transform(dataset, &rows), targets))
}
