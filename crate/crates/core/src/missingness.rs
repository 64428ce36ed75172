//! MCAR missingness injection with a ground-truth log, and per-attribute
//! missingness reporting.
//!
//! Injection masks each observed cell of a target attribute independently
//! with the configured probability, so the chance a cell disappears never
//! depends on any value in the table. Each target attribute draws from its
//! own substream keyed by the attribute index (see [`crate::rng`]), so adding
//! or removing a target leaves the other attributes' masks untouched and
//! per-attribute masking can run in parallel without changing the result.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Value};
use crate::error::DataError;
use crate::rng::substream;

/// What to mask: per-attribute rates plus the seed. MCAR is the only
/// mechanism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissingnessSpec {
    /// (attribute index, masking probability in [0,1]) pairs; indices must be
    /// valid and distinct.
    pub targets: Vec<(usize, f64)>,
    pub seed: u64,
}

impl MissingnessSpec {
    pub fn single(attr: usize, rate: f64, seed: u64) -> Self {
        MissingnessSpec {
            targets: vec![(attr, rate)],
            seed,
        }
    }

    fn validate(&self, dataset: &Dataset) -> Result<(), DataError> {
        let mut seen = std::collections::HashSet::new();
        for &(attr, rate) in &self.targets {
            if attr >= dataset.n_attributes() {
                return Err(DataError::AttributeOutOfRange(attr));
            }
            if !seen.insert(attr) {
                return Err(DataError::Invalid(format!(
                    "attribute {attr} listed twice in the missingness spec"
                )));
            }
            if !(0.0..=1.0).contains(&rate) || rate.is_nan() {
                return Err(DataError::Invalid(format!(
                    "rate {rate} for attribute {attr} is outside [0,1]"
                )));
            }
        }
        Ok(())
    }
}

/// Ground truth for masked cells: where they were and what they held.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedCellLog {
    pub entries: Vec<MaskedCell>,
    pub spec: MissingnessSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaskedCell {
    pub row: usize,
    pub attribute: usize,
    pub original: Value,
}

impl MaskedCellLog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// CSV rendering: `row_index,attribute_name,original_value` per cell.
    pub fn to_csv(&self, dataset: &Dataset) -> String {
        let mut out = String::from("row_index,attribute_name,original_value\n");
        for cell in &self.entries {
            let name = &dataset.attributes()[cell.attribute].name;
            let value = dataset.format_value(cell.attribute, &cell.original);
            let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
            writer
                .write_record([cell.row.to_string().as_str(), name, value.as_str()])
                .expect("in-memory write");
            out.push_str(
                std::str::from_utf8(&writer.into_inner().expect("in-memory flush"))
                    .expect("utf-8"),
            );
        }
        out
    }

    /// Writes every logged original back into `dataset`.
    pub fn restore(&self, dataset: &mut Dataset) -> Result<(), DataError> {
        for cell in &self.entries {
            dataset.set_cell(cell.row, cell.attribute, cell.original)?;
        }
        Ok(())
    }
}

/// Masks observed cells of the spec'd attributes independently at their
/// rates. Deterministic for a fixed seed; never touches other attributes or
/// already-missing cells.
pub fn inject_mcar(
    dataset: &Dataset,
    spec: &MissingnessSpec,
) -> Result<(Dataset, MaskedCellLog), DataError> {
    spec.validate(dataset)?;
    let mut masked = dataset.clone();
    let mut entries = Vec::new();
    for &(attr, rate) in &spec.targets {
        let mut rng = substream(spec.seed, attr as u64);
        for row in 0..dataset.n_rows() {
            let value = *dataset.cell(row, attr);
            if value.is_missing() {
                continue;
            }
            // one draw per observed cell, in row order
            let u: f64 = rng.random();
            if u < rate {
                masked.set_cell(row, attr, Value::Missing)?;
                entries.push(MaskedCell {
                    row,
                    attribute: attr,
                    original: value,
                });
            }
        }
    }
    entries.sort_by_key(|c| (c.row, c.attribute));
    Ok((
        masked,
        MaskedCellLog {
            entries,
            spec: spec.clone(),
        },
    ))
}

/// Per-attribute observed missingness with the conventional 5% and 10%
/// report thresholds (flags only; nothing is acted on automatically).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MissingnessReport {
    pub attributes: Vec<AttributeMissingness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttributeMissingness {
    pub name: String,
    pub missing_count: usize,
    pub missing_percentage: f64,
    /// Strictly above 5%.
    pub above_5_percent: bool,
    /// Strictly above 10%.
    pub above_10_percent: bool,
}

pub fn missingness_report(dataset: &Dataset) -> MissingnessReport {
    let n = dataset.n_rows();
    let attributes = dataset
        .attributes()
        .iter()
        .enumerate()
        .map(|(a, attr)| {
            let missing_count = dataset.missing_count(a);
            let pct = if n == 0 {
                0.0
            } else {
                100.0 * missing_count as f64 / n as f64
            };
            AttributeMissingness {
                name: attr.name.clone(),
                missing_count,
                missing_percentage: pct,
                above_5_percent: pct > 5.0,
                above_10_percent: pct > 10.0,
            }
        })
        .collect();
    MissingnessReport { attributes }
}
