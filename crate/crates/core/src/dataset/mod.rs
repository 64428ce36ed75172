//! Column-typed tabular data with missing cells.
//!
//! A [`Dataset`] is a relation name, a schema of nominal/numeric
//! [`Attribute`]s, and rows of [`Value`]s. It is immutable in spirit: every
//! constructor validates the structural invariants (row arity, cell kinds,
//! finite numerics, unique attribute names, non-empty duplicate-free category
//! lists), and the only mutator re-checks them. Parsing, summarizing, and
//! encoding are pure functions of their inputs, so a `Dataset` can be shared
//! freely across threads.

mod arff;
mod csvfmt;
mod encode;
mod summary;

pub use arff::{parse_arff, serialize_arff};
pub use csvfmt::{parse_csv, serialize_csv, TypeInference};
pub use encode::{
    encode_features, ColumnDescriptor, ColumnRole, FeatureEncoder, FeatureMatrix, TargetVector,
};
pub use summary::{AttributeSummary, DatasetSummary, SummaryKind};

use serde::{Deserialize, Serialize};

use crate::error::DataError;

/// Attribute type: an ordered category list, or a real number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttributeKind {
    /// Categories in declaration order; indices into this list are the
    /// nominal payload of [`Value::Nominal`].
    Nominal(Vec<String>),
    Numeric,
}

impl AttributeKind {
    pub fn is_nominal(&self) -> bool {
        matches!(self, AttributeKind::Nominal(_))
    }

    pub fn categories(&self) -> Option<&[String]> {
        match self {
            AttributeKind::Nominal(c) => Some(c),
            AttributeKind::Numeric => None,
        }
    }
}

/// A named column of the schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
}

impl Attribute {
    pub fn nominal(name: impl Into<String>, categories: Vec<String>) -> Self {
        Attribute {
            name: name.into(),
            kind: AttributeKind::Nominal(categories),
        }
    }

    pub fn numeric(name: impl Into<String>) -> Self {
        Attribute {
            name: name.into(),
            kind: AttributeKind::Numeric,
        }
    }
}

/// One cell. Nominal payloads index into the owning attribute's category
/// list; numeric payloads are always finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Value {
    Nominal(usize),
    Numeric(f64),
    Missing,
}

impl Value {
    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }

    pub fn as_numeric(&self) -> Option<f64> {
        match self {
            Value::Numeric(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_nominal(&self) -> Option<usize> {
        match self {
            Value::Nominal(i) => Some(*i),
            _ => None,
        }
    }
}

/// A validated table of values.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    relation: String,
    attributes: Vec<Attribute>,
    rows: Vec<Vec<Value>>,
    class_index: Option<usize>,
}

impl Dataset {
    /// Builds a dataset, checking every structural invariant.
    pub fn new(
        relation: impl Into<String>,
        attributes: Vec<Attribute>,
        rows: Vec<Vec<Value>>,
        class_index: Option<usize>,
    ) -> Result<Self, DataError> {
        let mut seen = std::collections::HashSet::new();
        for attr in &attributes {
            if !seen.insert(attr.name.as_str()) {
                return Err(DataError::DuplicateAttribute(attr.name.clone()));
            }
            if let AttributeKind::Nominal(cats) = &attr.kind {
                if cats.is_empty() {
                    return Err(DataError::EmptyCategories(attr.name.clone()));
                }
                let mut cat_seen = std::collections::HashSet::new();
                for c in cats {
                    if !cat_seen.insert(c.as_str()) {
                        return Err(DataError::DuplicateCategory(attr.name.clone(), c.clone()));
                    }
                }
            }
        }
        if let Some(ci) = class_index {
            if ci >= attributes.len() {
                return Err(DataError::AttributeOutOfRange(ci));
            }
        }
        let dataset = Dataset {
            relation: relation.into(),
            attributes,
            rows: Vec::new(),
            class_index,
        };
        let mut dataset = dataset;
        for (r, row) in rows.into_iter().enumerate() {
            dataset.check_row(r, &row)?;
            dataset.rows.push(row);
        }
        Ok(dataset)
    }

    fn check_row(&self, row_index: usize, row: &[Value]) -> Result<(), DataError> {
        if row.len() != self.attributes.len() {
            return Err(DataError::RowArity {
                row: row_index,
                found: row.len(),
                expected: self.attributes.len(),
            });
        }
        for (a, (value, attr)) in row.iter().zip(&self.attributes).enumerate() {
            self.check_cell(row_index, a, attr, value)?;
        }
        Ok(())
    }

    fn check_cell(
        &self,
        row: usize,
        _attr_index: usize,
        attr: &Attribute,
        value: &Value,
    ) -> Result<(), DataError> {
        match (value, &attr.kind) {
            (Value::Missing, _) => Ok(()),
            (Value::Numeric(v), AttributeKind::Numeric) => {
                if v.is_finite() {
                    Ok(())
                } else {
                    Err(DataError::CellMismatch {
                        row,
                        attribute: attr.name.clone(),
                        detail: format!("numeric value {v} is not finite"),
                    })
                }
            }
            (Value::Nominal(i), AttributeKind::Nominal(cats)) => {
                if *i < cats.len() {
                    Ok(())
                } else {
                    Err(DataError::CellMismatch {
                        row,
                        attribute: attr.name.clone(),
                        detail: format!("category index {i} exceeds {} categories", cats.len()),
                    })
                }
            }
            (v, _) => Err(DataError::CellMismatch {
                row,
                attribute: attr.name.clone(),
                detail: format!("cell {v:?} does not match the attribute kind"),
            }),
        }
    }

    pub fn relation(&self) -> &str {
        &self.relation
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute(&self, index: usize) -> Result<&Attribute, DataError> {
        self.attributes
            .get(index)
            .ok_or(DataError::AttributeOutOfRange(index))
    }

    /// Resolves an attribute by exact name.
    pub fn attribute_index(&self, name: &str) -> Result<usize, DataError> {
        self.attributes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| DataError::NoSuchAttribute(name.to_string()))
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_attributes(&self) -> usize {
        self.attributes.len()
    }

    /// The designated class attribute, when one is known. Parsing ARFF sets
    /// it to the last attribute.
    pub fn class_index(&self) -> Option<usize> {
        self.class_index
    }

    pub fn with_class_index(mut self, class_index: Option<usize>) -> Result<Self, DataError> {
        if let Some(ci) = class_index {
            if ci >= self.attributes.len() {
                return Err(DataError::AttributeOutOfRange(ci));
            }
        }
        self.class_index = class_index;
        Ok(self)
    }

    pub fn cell(&self, row: usize, attr: usize) -> &Value {
        &self.rows[row][attr]
    }

    /// Writes one cell, re-validating it against the attribute kind.
    pub fn set_cell(&mut self, row: usize, attr: usize, value: Value) -> Result<(), DataError> {
        if row >= self.rows.len() {
            return Err(DataError::Invalid(format!("row {row} out of range")));
        }
        let attribute = self.attribute(attr)?.clone();
        self.check_cell(row, attr, &attribute, &value)?;
        self.rows[row][attr] = value;
        Ok(())
    }

    /// Row indices whose cell for `attr` is observed (not missing).
    pub fn observed_rows(&self, attr: usize) -> Vec<usize> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, row)| !row[attr].is_missing())
            .map(|(r, _)| r)
            .collect()
    }

    /// Row indices whose cell for `attr` is missing.
    pub fn missing_rows(&self, attr: usize) -> Vec<usize> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, row)| row[attr].is_missing())
            .map(|(r, _)| r)
            .collect()
    }

    pub fn missing_count(&self, attr: usize) -> usize {
        self.rows.iter().filter(|row| row[attr].is_missing()).count()
    }

    pub fn total_missing(&self) -> usize {
        (0..self.n_attributes())
            .map(|a| self.missing_count(a))
            .sum()
    }

    /// Renders an observed value for reports and logs; numeric values use the
    /// shortest round-trip form.
    pub fn format_value(&self, attr: usize, value: &Value) -> String {
        match value {
            Value::Missing => "?".to_string(),
            Value::Numeric(v) => format!("{v}"),
            Value::Nominal(i) => match &self.attributes[attr].kind {
                AttributeKind::Nominal(cats) => cats[*i].clone(),
                AttributeKind::Numeric => format!("{i}"),
            },
        }
    }

    pub fn summarize(&self) -> DatasetSummary {
        summary::summarize(self)
    }
}
