//! CSV ingestion with type inference, and CSV output for completed datasets.
//!
//! RFC-4180 quoting, comma separator, `\n` or `\r\n` line endings. An empty
//! field or `?` denotes a missing cell.

use super::{Attribute, AttributeKind, Dataset, Value};
use crate::error::ParseError;

/// How to assign column types when reading CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TypeInference {
    /// Numeric when every non-missing token parses as a finite real, else
    /// nominal with categories in first-appearance order.
    #[default]
    Auto,
    /// Treat every column as nominal.
    AllNominal,
}

pub fn parse_csv(
    text: &str,
    has_header: bool,
    inference: TypeInference,
) -> Result<Dataset, ParseError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());

    let mut records: Vec<(usize, Vec<String>)> = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| csv_error(e, text))?;
        let line = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or(records.len() + 1);
        records.push((line, record.iter().map(|s| s.to_string()).collect()));
    }
    if records.is_empty() {
        return Err(ParseError::Invalid {
            line: 1,
            detail: "empty CSV input".into(),
        });
    }

    let (names, data_start) = if has_header {
        let (_, header) = &records[0];
        (header.clone(), 1)
    } else {
        ((0..records[0].1.len()).map(|i| format!("c{i}")).collect(), 0)
    };
    let width = names.len();

    for (line, fields) in &records[data_start..] {
        if fields.len() != width {
            return Err(ParseError::RowArity {
                line: *line,
                expected: width,
                found: fields.len(),
            });
        }
    }

    let rows_text: Vec<&Vec<String>> = records[data_start..].iter().map(|(_, f)| f).collect();

    let mut attributes = Vec::with_capacity(width);
    let mut columns: Vec<Vec<Value>> = Vec::with_capacity(width);
    for col in 0..width {
        let tokens: Vec<&str> = rows_text.iter().map(|r| r[col].as_str()).collect();
        let numeric = matches!(inference, TypeInference::Auto)
            && tokens
                .iter()
                .filter(|t| !is_missing_token(t))
                .all(|t| t.trim().parse::<f64>().map(|v| v.is_finite()).unwrap_or(false));
        if numeric {
            attributes.push(Attribute::numeric(names[col].clone()));
            columns.push(
                tokens
                    .iter()
                    .map(|t| {
                        if is_missing_token(t) {
                            Value::Missing
                        } else {
                            Value::Numeric(t.trim().parse().unwrap())
                        }
                    })
                    .collect(),
            );
        } else {
            let mut categories: Vec<String> = Vec::new();
            let mut values = Vec::with_capacity(tokens.len());
            for t in &tokens {
                if is_missing_token(t) {
                    values.push(Value::Missing);
                } else {
                    let idx = categories.iter().position(|c| c == t).unwrap_or_else(|| {
                        categories.push(t.to_string());
                        categories.len() - 1
                    });
                    values.push(Value::Nominal(idx));
                }
            }
            if categories.is_empty() {
                // all-missing column under AllNominal: give it one placeholder
                categories.push("?unobserved".into());
            }
            attributes.push(Attribute::nominal(names[col].clone(), categories));
            columns.push(values);
        }
    }

    let n_rows = rows_text.len();
    let rows: Vec<Vec<Value>> = (0..n_rows)
        .map(|r| (0..width).map(|c| columns[c][r]).collect())
        .collect();

    Dataset::new("csv", attributes, rows, None).map_err(|e| ParseError::Invalid {
        line: 1,
        detail: e.to_string(),
    })
}

fn is_missing_token(token: &str) -> bool {
    token.is_empty() || token == "?"
}

fn csv_error(e: csv::Error, _text: &str) -> ParseError {
    let line = match e.position() {
        Some(p) => p.line() as usize,
        None => 1,
    };
    ParseError::Invalid {
        line,
        detail: e.to_string(),
    }
}

/// Writes a dataset as CSV with a header row; missing cells become `?`.
pub fn serialize_csv(dataset: &Dataset) -> String {
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    writer
        .write_record(dataset.attributes().iter().map(|a| a.name.as_str()))
        .expect("in-memory write");
    for row in dataset.rows() {
        let fields: Vec<String> = row
            .iter()
            .zip(dataset.attributes())
            .map(|(v, attr)| match v {
                Value::Missing => "?".to_string(),
                Value::Numeric(x) => format!("{x}"),
                Value::Nominal(i) => match &attr.kind {
                    AttributeKind::Nominal(cats) => cats[*i].clone(),
                    AttributeKind::Numeric => unreachable!("validated dataset"),
                },
            })
            .collect();
        writer.write_record(&fields).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infers_numeric_and_nominal() {
        let d = parse_csv("a,b\n1,x\n2,y\n", true, TypeInference::Auto).unwrap();
        assert_eq!(d.attributes()[0].kind, AttributeKind::Numeric);
        assert_eq!(
            d.attributes()[1].kind,
            AttributeKind::Nominal(vec!["x".into(), "y".into()])
        );
        assert_eq!(d.cell(1, 0), &Value::Numeric(2.0));
        assert_eq!(d.cell(1, 1), &Value::Nominal(1));
    }

    #[test]
    fn empty_and_question_mark_are_missing() {
        let d = parse_csv("a\n1\n?\n", true, TypeInference::Auto).unwrap();
        assert_eq!(d.attributes()[0].kind, AttributeKind::Numeric);
        assert_eq!(d.missing_count(0), 1);

        let d = parse_csv("a,b\n1,\n,x\n", true, TypeInference::Auto).unwrap();
        assert_eq!(d.cell(0, 1), &Value::Missing);
        assert_eq!(d.cell(1, 0), &Value::Missing);
    }

    #[test]
    fn ragged_row_error_names_the_row() {
        let err = parse_csv("a\n1\n1,2\n", true, TypeInference::Auto).unwrap_err();
        assert_eq!(
            err,
            ParseError::RowArity {
                line: 3,
                expected: 1,
                found: 2
            }
        );
    }

    #[test]
    fn mixed_tokens_force_nominal() {
        let d = parse_csv("a\n1\nx\n2\n", true, TypeInference::Auto).unwrap();
        assert_eq!(
            d.attributes()[0].kind,
            AttributeKind::Nominal(vec!["1".into(), "x".into(), "2".into()])
        );
    }

    #[test]
    fn all_nominal_policy_keeps_numbers_as_categories() {
        let d = parse_csv("a\n1\n2\n", true, TypeInference::AllNominal).unwrap();
        assert_eq!(
            d.attributes()[0].kind,
            AttributeKind::Nominal(vec!["1".into(), "2".into()])
        );
    }

    #[test]
    fn quoted_fields_and_crlf() {
        let d = parse_csv("a,b\r\n\"x, y\",3\r\n", true, TypeInference::Auto).unwrap();
        assert_eq!(
            d.attributes()[0].kind,
            AttributeKind::Nominal(vec!["x, y".into()])
        );
        assert_eq!(d.cell(0, 1), &Value::Numeric(3.0));
    }

    #[test]
    fn csv_roundtrip_through_serializer() {
        let d = parse_csv("a,b\n1,x\n?,y\n", true, TypeInference::Auto).unwrap();
        let text = serialize_csv(&d);
        let d2 = parse_csv(&text, true, TypeInference::Auto).unwrap();
        assert_eq!(d.rows(), d2.rows());
        assert_eq!(d.attributes(), d2.attributes());
    }
}
