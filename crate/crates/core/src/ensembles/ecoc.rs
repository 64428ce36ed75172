//! Error-correcting output codes: a ±1 code matrix of binary dichotomies
//! turns any binary learner into a multiclass classifier. Decoding picks the
//! class row nearest in Hamming distance to the member sign vector; ties go
//! to the class with the largest summed signed margin, then the lowest index.

use serde::{Deserialize, Serialize};

use crate::dataset::{FeatureMatrix, TargetVector};
use crate::error::ModelError;
use crate::learners::{LearnerConfig, TrainedModel};
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EcocScheme {
    OneVsRest,
}

/// Rows = classes, columns = binary dichotomies, entries ±1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EcocCodeMatrix {
    scheme: EcocScheme,
    /// `code[class][column]`.
    code: Vec<Vec<i8>>,
}

impl EcocCodeMatrix {
    pub fn scheme(&self) -> EcocScheme {
        self.scheme
    }

    pub fn class_count(&self) -> usize {
        self.code.len()
    }

    pub fn column_count(&self) -> usize {
        self.code.first().map_or(0, |r| r.len())
    }

    pub fn entry(&self, class: usize, column: usize) -> i8 {
        self.code[class][column]
    }

    fn validate(&self) -> Result<(), ModelError> {
        let (k, cols) = (self.class_count(), self.column_count());
        if k < 2 || cols == 0 {
            return Err(ModelError::InvalidConfig(
                "code matrix needs at least two classes and one column".into(),
            ));
        }
        for row in &self.code {
            if row.len() != cols {
                return Err(ModelError::InvalidConfig("ragged code matrix".into()));
            }
            if row.iter().any(|&e| e != 1 && e != -1) {
                return Err(ModelError::InvalidConfig("code entries must be ±1".into()));
            }
        }
        for a in 0..k {
            for b in a + 1..k {
                if self.code[a] == self.code[b] {
                    return Err(ModelError::InvalidConfig(format!(
                        "classes {a} and {b} share a code row"
                    )));
                }
            }
        }
        for j in 0..cols {
            let first = self.code[0][j];
            if (1..k).all(|r| self.code[r][j] == first) {
                return Err(ModelError::InvalidConfig(format!("column {j} is constant")));
            }
        }
        Ok(())
    }
}

/// One-vs-rest code: column j carries +1 for class j and -1 elsewhere. Two
/// classes collapse to the single column [+1, -1].
pub fn build_ecoc_matrix(
    class_count: usize,
    scheme: EcocScheme,
) -> Result<EcocCodeMatrix, ModelError> {
    if class_count < 2 {
        return Err(ModelError::InvalidConfig(format!(
            "ECOC needs at least two classes, got {class_count}"
        )));
    }
    let EcocScheme::OneVsRest = scheme;
    let code = if class_count == 2 {
        vec![vec![1], vec![-1]]
    } else {
        (0..class_count)
            .map(|r| {
                (0..class_count)
                    .map(|j| if r == j { 1 } else { -1 })
                    .collect()
            })
            .collect()
    };
    let matrix = EcocCodeMatrix { scheme, code };
    matrix.validate()?;
    Ok(matrix)
}

/// Per-column binary models; a column whose recoded labels were single-class
/// is skipped and recorded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcocModel {
    code: EcocCodeMatrix,
    members: Vec<Option<TrainedModel>>,
    skipped_columns: Vec<usize>,
}

impl EcocModel {
    pub fn code(&self) -> &EcocCodeMatrix {
        &self.code
    }

    pub fn members(&self) -> &[Option<TrainedModel>] {
        &self.members
    }

    pub fn skipped_columns(&self) -> &[usize] {
        &self.skipped_columns
    }

    pub fn feature_arity(&self) -> usize {
        self.members
            .iter()
            .flatten()
            .next()
            .map(|m| m.feature_arity())
            .unwrap_or(0)
    }

    pub fn predict(&self, row: &[f64]) -> Result<usize, ModelError> {
        let mut margins: Vec<(usize, f64)> = Vec::with_capacity(self.members.len());
        for (j, member) in self.members.iter().enumerate() {
            if let Some(m) = member {
                margins.push((j, m.binary_margin(row)?));
            }
        }
        debug_assert!(!margins.is_empty());
        Ok(decode_margins(&self.code, &margins))
    }
}

/// Decodes `(column, signed margin)` pairs against the code matrix: nearest
/// row by Hamming distance over the margin signs, ties to the largest
/// summed signed margin, then the lowest class index.
pub(crate) fn decode_margins(code: &EcocCodeMatrix, margins: &[(usize, f64)]) -> usize {
    let mut best_class = 0;
    let mut best_key = (usize::MAX, f64::NEG_INFINITY);
    for class in 0..code.class_count() {
        let mut hamming = 0;
        let mut margin_sum = 0.0;
        for &(j, score) in margins {
            let entry = f64::from(code.entry(class, j));
            let sign = if score >= 0.0 { 1.0 } else { -1.0 };
            if sign != entry {
                hamming += 1;
            }
            margin_sum += entry * score;
        }
        if hamming < best_key.0 || (hamming == best_key.0 && margin_sum > best_key.1) {
            best_key = (hamming, margin_sum);
            best_class = class;
        }
    }
    best_class
}

pub(super) fn train_ecoc_model(
    features: &FeatureMatrix,
    targets: &TargetVector,
    binary: &LearnerConfig,
    code: &EcocCodeMatrix,
    seed: u64,
) -> Result<EcocModel, ModelError> {
    let TargetVector::Classes { labels, class_count } = targets else {
        return Err(ModelError::TaskMismatch("ECOC needs a nominal target".into()));
    };
    code.validate()?;
    if code.class_count() != *class_count {
        return Err(ModelError::InvalidConfig(format!(
            "code matrix has {} rows but the target has {} classes",
            code.class_count(),
            class_count
        )));
    }
    let mut members = Vec::with_capacity(code.column_count());
    let mut skipped_columns = Vec::new();
    for j in 0..code.column_count() {
        let recoded: Vec<usize> = labels
            .iter()
            .map(|&l| usize::from(code.entry(l, j) > 0))
            .collect();
        let distinct = recoded.contains(&0) as usize + recoded.contains(&1) as usize;
        if distinct < 2 {
            skipped_columns.push(j);
            members.push(None);
            continue;
        }
        let recoded_targets = TargetVector::Classes {
            labels: recoded,
            class_count: 2,
        };
        let member = binary
            .reseeded(derive_seed(seed, j as u64))
            .train(features, &recoded_targets)?;
        members.push(Some(member));
    }
    if members.iter().all(Option::is_none) {
        return Err(ModelError::AllColumnsSkipped);
    }
    Ok(EcocModel {
        code: code.clone(),
        members,
        skipped_columns,
    })
}
