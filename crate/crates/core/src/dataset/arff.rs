//! ARFF text format: `@relation` / `@attribute` / `@data` sections, `%`
//! comments, `?` for missing cells, single- or double-quoted tokens.
//!
//! The supported subset covers nominal and numeric attributes
//! (`numeric`/`real`/`integer` all map to numeric). `string` and `date`
//! attributes and sparse `{index value}` rows are rejected with an error
//! naming the line. The last attribute becomes the default class attribute.

use super::{Attribute, AttributeKind, Dataset, Value};
use crate::error::ParseError;

pub fn parse_arff(text: &str) -> Result<Dataset, ParseError> {
    let mut relation: Option<String> = None;
    let mut attributes: Vec<Attribute> = Vec::new();
    let mut rows: Vec<Vec<Value>> = Vec::new();
    let mut in_data = false;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }

        if !in_data {
            let lower = line.to_ascii_lowercase();
            if lower.starts_with("@relation") {
                let rest = line["@relation".len()..].trim();
                relation = Some(parse_single_name(rest, line_no)?);
            } else if lower.starts_with("@attribute") {
                if relation.is_none() {
                    return Err(ParseError::MalformedHeader {
                        line: line_no,
                        detail: "@attribute before @relation".into(),
                    });
                }
                let rest = line["@attribute".len()..].trim();
                attributes.push(parse_attribute(rest, line_no)?);
            } else if lower == "@data" || lower.starts_with("@data") {
                if attributes.is_empty() {
                    return Err(ParseError::MalformedHeader {
                        line: line_no,
                        detail: "no attributes declared before @data".into(),
                    });
                }
                in_data = true;
            } else {
                return Err(ParseError::MalformedHeader {
                    line: line_no,
                    detail: format!("unexpected line `{line}`"),
                });
            }
        } else {
            if line.starts_with('{') {
                return Err(ParseError::Invalid {
                    line: line_no,
                    detail: "sparse ARFF rows are not supported".into(),
                });
            }
            let tokens = split_tokens(line, line_no)?;
            if tokens.len() != attributes.len() {
                return Err(ParseError::RowArity {
                    line: line_no,
                    expected: attributes.len(),
                    found: tokens.len(),
                });
            }
            let mut row = Vec::with_capacity(tokens.len());
            for (token, attr) in tokens.iter().zip(&attributes) {
                row.push(parse_cell(token, attr, line_no)?);
            }
            rows.push(row);
        }
    }

    if !in_data {
        return Err(ParseError::MalformedHeader {
            line: last_line,
            detail: "missing @data section".into(),
        });
    }

    let class_index = Some(attributes.len() - 1);
    Dataset::new(relation.unwrap_or_default(), attributes, rows, class_index).map_err(|e| {
        ParseError::Invalid {
            line: last_line,
            detail: e.to_string(),
        }
    })
}

fn parse_cell(token: &Token, attr: &Attribute, line: usize) -> Result<Value, ParseError> {
    // an unquoted `?` is the missing marker; a quoted `'?'` is a literal
    if token.text == "?" && !token.quoted {
        return Ok(Value::Missing);
    }
    match &attr.kind {
        AttributeKind::Numeric => {
            let v: f64 = token.text.parse().map_err(|_| ParseError::InvalidNumber {
                line,
                token: token.text.clone(),
            })?;
            if !v.is_finite() {
                return Err(ParseError::InvalidNumber {
                    line,
                    token: token.text.clone(),
                });
            }
            Ok(Value::Numeric(v))
        }
        AttributeKind::Nominal(cats) => cats
            .iter()
            .position(|c| c == &token.text)
            .map(Value::Nominal)
            .ok_or_else(|| ParseError::UndeclaredNominal {
                line,
                token: token.text.clone(),
                attribute: attr.name.clone(),
            }),
    }
}

fn parse_attribute(rest: &str, line: usize) -> Result<Attribute, ParseError> {
    let (name, type_part) = split_name(rest, line)?;
    let type_part = type_part.trim();
    if type_part.is_empty() {
        return Err(ParseError::MalformedHeader {
            line,
            detail: format!("attribute `{name}` has no type"),
        });
    }
    if let Some(inner) = type_part.strip_prefix('{') {
        let inner = inner.strip_suffix('}').ok_or(ParseError::MalformedHeader {
            line,
            detail: "unterminated category list".into(),
        })?;
        let categories: Vec<String> = split_tokens(inner, line)?
            .into_iter()
            .map(|t| t.text)
            .collect();
        if categories.iter().any(|c| c.is_empty()) {
            return Err(ParseError::MalformedHeader {
                line,
                detail: "empty category in list".into(),
            });
        }
        return Ok(Attribute::nominal(name, categories));
    }
    match type_part.to_ascii_lowercase().as_str() {
        "numeric" | "real" | "integer" => Ok(Attribute::numeric(name)),
        other => Err(ParseError::UnsupportedAttributeType {
            line,
            type_name: other.to_string(),
        }),
    }
}

/// Splits `@attribute` remainder into (name, rest). The name may be quoted.
fn split_name(rest: &str, line: usize) -> Result<(String, &str), ParseError> {
    let rest = rest.trim_start();
    let mut chars = rest.char_indices();
    match chars.next() {
        Some((_, q @ ('\'' | '"'))) => {
            let mut name = String::new();
            let mut escaped = false;
            for (i, ch) in chars {
                if escaped {
                    name.push(ch);
                    escaped = false;
                } else if ch == '\\' {
                    escaped = true;
                } else if ch == q {
                    return Ok((name, &rest[i + ch.len_utf8()..]));
                } else {
                    name.push(ch);
                }
            }
            Err(ParseError::MalformedHeader {
                line,
                detail: "unterminated quoted name".into(),
            })
        }
        Some(_) => {
            let end = rest
                .char_indices()
                .find(|(_, c)| c.is_whitespace())
                .map(|(i, _)| i)
                .unwrap_or(rest.len());
            Ok((rest[..end].to_string(), &rest[end..]))
        }
        None => Err(ParseError::MalformedHeader {
            line,
            detail: "missing attribute name".into(),
        }),
    }
}

fn parse_single_name(rest: &str, line: usize) -> Result<String, ParseError> {
    if rest.is_empty() {
        return Err(ParseError::MalformedHeader {
            line,
            detail: "missing relation name".into(),
        });
    }
    let tokens = split_tokens(rest, line)?;
    if tokens.len() != 1 {
        return Err(ParseError::MalformedHeader {
            line,
            detail: "relation name must be a single token".into(),
        });
    }
    Ok(tokens.into_iter().next().unwrap().text)
}

struct Token {
    text: String,
    quoted: bool,
}

/// Splits a comma-separated token list. Tokens may be quoted with `'` or `"`;
/// inside quotes a backslash escapes the next character. Unquoted tokens are
/// trimmed of surrounding whitespace.
fn split_tokens(text: &str, line: usize) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    loop {
        while matches!(chars.peek(), Some(c) if c.is_whitespace()) {
            chars.next();
        }
        match chars.peek() {
            Some(&q @ ('\'' | '"')) => {
                chars.next();
                let mut token = String::new();
                let mut escaped = false;
                let mut closed = false;
                for ch in chars.by_ref() {
                    if escaped {
                        token.push(ch);
                        escaped = false;
                    } else if ch == '\\' {
                        escaped = true;
                    } else if ch == q {
                        closed = true;
                        break;
                    } else {
                        token.push(ch);
                    }
                }
                if !closed {
                    return Err(ParseError::Invalid {
                        line,
                        detail: "unterminated quoted token".into(),
                    });
                }
                while matches!(chars.peek(), Some(c) if c.is_whitespace()) {
                    chars.next();
                }
                match chars.next() {
                    None => {
                        tokens.push(Token { text: token, quoted: true });
                        break;
                    }
                    Some(',') => tokens.push(Token { text: token, quoted: true }),
                    Some(other) => {
                        return Err(ParseError::Invalid {
                            line,
                            detail: format!("unexpected `{other}` after quoted token"),
                        })
                    }
                }
            }
            _ => {
                let mut token = String::new();
                let mut done = true;
                for ch in chars.by_ref() {
                    if ch == ',' {
                        done = false;
                        break;
                    }
                    token.push(ch);
                }
                tokens.push(Token {
                    text: token.trim_end().to_string(),
                    quoted: false,
                });
                if done {
                    break;
                }
            }
        }
    }
    Ok(tokens)
}

/// Serializes a dataset as ARFF text with `\n` line endings and `?` for
/// missing cells. The output re-parses to an equal dataset.
pub fn serialize_arff(dataset: &Dataset) -> String {
    let mut out = String::new();
    out.push_str("@relation ");
    out.push_str(&quote_if_needed(dataset.relation()));
    out.push_str("\n\n");
    for attr in dataset.attributes() {
        out.push_str("@attribute ");
        out.push_str(&quote_if_needed(&attr.name));
        match &attr.kind {
            AttributeKind::Numeric => out.push_str(" numeric"),
            AttributeKind::Nominal(cats) => {
                out.push_str(" {");
                for (i, c) in cats.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(&quote_if_needed(c));
                }
                out.push('}');
            }
        }
        out.push('\n');
    }
    out.push_str("\n@data\n");
    for row in dataset.rows() {
        let mut first = true;
        for (value, attr) in row.iter().zip(dataset.attributes()) {
            if !first {
                out.push(',');
            }
            first = false;
            match value {
                Value::Missing => out.push('?'),
                Value::Numeric(v) => out.push_str(&format!("{v}")),
                Value::Nominal(i) => match &attr.kind {
                    AttributeKind::Nominal(cats) => out.push_str(&quote_if_needed(&cats[*i])),
                    AttributeKind::Numeric => unreachable!("validated dataset"),
                },
            }
        }
        out.push('\n');
    }
    out
}

fn quote_if_needed(token: &str) -> String {
    let needs = token.is_empty()
        || token == "?"
        || token.starts_with('@')
        || token
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, ',' | '{' | '}' | '\'' | '"' | '%' | '\\'));
    if !needs {
        return token.to_string();
    }
    let mut quoted = String::with_capacity(token.len() + 2);
    quoted.push('\'');
    for c in token.chars() {
        if c == '\'' || c == '\\' {
            quoted.push('\\');
        }
        quoted.push(c);
    }
    quoted.push('\'');
    quoted
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "% a comment\n\
        @RELATION weather\n\
        @attribute outlook {sunny, overcast, 'rainy day'}\n\
        @attribute temperature REAL\n\
        @ATTRIBUTE humidity integer\n\
        @data\n\
        sunny, 85, 85\n\
        'rainy day', ?, 90\n\
        % trailing comment\n\
        overcast, 7.2e1, ?\n";

    #[test]
    fn parses_header_and_rows() {
        let d = parse_arff(SMALL).unwrap();
        assert_eq!(d.relation(), "weather");
        assert_eq!(d.n_attributes(), 3);
        assert_eq!(d.n_rows(), 3);
        assert_eq!(d.class_index(), Some(2));
        assert_eq!(d.cell(0, 0), &Value::Nominal(0));
        assert_eq!(d.cell(1, 0), &Value::Nominal(2));
        assert_eq!(d.cell(1, 1), &Value::Missing);
        assert_eq!(d.cell(2, 1), &Value::Numeric(72.0));
        assert_eq!(d.cell(2, 2), &Value::Missing);
    }

    #[test]
    fn single_missing_cell() {
        let d = parse_arff("@relation t\n@attribute a {x}\n@data\n?\n").unwrap();
        assert_eq!(d.n_rows(), 1);
        assert_eq!(d.cell(0, 0), &Value::Missing);
    }

    #[test]
    fn rejects_undeclared_nominal_with_line() {
        let err = parse_arff("@relation t\n@attribute a {x}\n@data\ny\n").unwrap_err();
        assert_eq!(
            err,
            ParseError::UndeclaredNominal {
                line: 4,
                token: "y".into(),
                attribute: "a".into()
            }
        );
    }

    #[test]
    fn rejects_arity_mismatch_with_line() {
        let err = parse_arff("@relation t\n@attribute a numeric\n@data\n1,2\n").unwrap_err();
        assert_eq!(
            err,
            ParseError::RowArity {
                line: 4,
                expected: 1,
                found: 2
            }
        );
    }

    #[test]
    fn rejects_string_date_and_sparse() {
        let err = parse_arff("@relation t\n@attribute a string\n@data\n").unwrap_err();
        assert!(matches!(err, ParseError::UnsupportedAttributeType { line: 2, .. }));

        let err = parse_arff("@relation t\n@attribute a date\n@data\n").unwrap_err();
        assert!(matches!(err, ParseError::UnsupportedAttributeType { .. }));

        let err =
            parse_arff("@relation t\n@attribute a numeric\n@data\n{0 1}\n").unwrap_err();
        assert!(matches!(err, ParseError::Invalid { line: 4, .. }));
    }

    #[test]
    fn rejects_non_finite_numbers() {
        for bad in ["1e999", "inf", "nan", "abc"] {
            let text = format!("@relation t\n@attribute a numeric\n@data\n{bad}\n");
            let err = parse_arff(&text).unwrap_err();
            assert!(
                matches!(err, ParseError::InvalidNumber { line: 4, .. }),
                "{bad}: {err:?}"
            );
        }
    }

    #[test]
    fn missing_data_section_is_an_error() {
        let err = parse_arff("@relation t\n@attribute a numeric\n").unwrap_err();
        assert!(matches!(err, ParseError::MalformedHeader { .. }));
    }

    #[test]
    fn roundtrip_small() {
        let d = parse_arff(SMALL).unwrap();
        let text = serialize_arff(&d);
        let d2 = parse_arff(&text).unwrap();
        assert_eq!(d, d2);
        assert_eq!(text, serialize_arff(&d2));
        assert!(text.contains('?'));
    }

    #[test]
    fn roundtrip_empty_rows() {
        let d = parse_arff("@relation t\n@attribute a numeric\n@data\n").unwrap();
        assert_eq!(d.n_rows(), 0);
        let text = serialize_arff(&d);
        assert!(text.ends_with("@data\n"));
        assert_eq!(parse_arff(&text).unwrap(), d);
    }

    #[test]
    fn quoting_roundtrips_awkward_tokens() {
        let d = Dataset::new(
            "rel with space",
            vec![
                Attribute::nominal(
                    "the attr",
                    vec!["a,b".into(), "?".into(), "it's".into(), "back\\slash".into()],
                ),
                Attribute::numeric("n"),
            ],
            vec![
                vec![Value::Nominal(1), Value::Numeric(-0.5)],
                vec![Value::Nominal(3), Value::Missing],
            ],
            Some(1),
        )
        .unwrap();
        let text = serialize_arff(&d);
        assert_eq!(parse_arff(&text).unwrap(), d);
    }
}
