//! The line-oriented map file:
//!
//! ```text
//! # tent map
//! name = phi_2_2
//! breakpoints = 0, 1/2, 1
//! values = 0, 2, 0
//! meta.source = hand written
//! ```

use std::collections::BTreeMap;

use pmk_core::{Limits, PLCircleMap, PLLift, Rational};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapSpec {
    pub name: Option<String>,
    pub breakpoints: Vec<Rational>,
    pub values: Vec<Rational>,
    /// `meta.<key>` entries with the prefix stripped
    pub metadata: BTreeMap<String, String>,
    /// hex SHA-256 of the exact input bytes
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn parse_list(line: usize, key: &str, raw: &str) -> Result<Vec<Rational>, CliError> {
    let body = raw.trim();
    let body = body
        .strip_prefix('[')
        .and_then(|b| b.strip_suffix(']'))
        .unwrap_or(body);
    if body.trim().is_empty() {
        return Err(CliError::Parse {
            line,
            message: format!("{key} is empty"),
        });
    }
    body.split(',')
        .enumerate()
        .map(|(i, tok)| {
            let tok = tok.trim().trim_matches('"');
            tok.parse::<Rational>().map_err(|_| CliError::Parse {
                line,
                message: format!("{key}[{i}]: {tok:?} is not a rational of the form p/q"),
            })
        })
        .collect()
}

pub fn parse_spec(text: &str) -> Result<MapSpec, CliError> {
    let mut name = None;
    let mut breakpoints = None;
    let mut values = None;
    let mut metadata = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| CliError::Parse {
            line,
            message: format!("expected `key = value`, got {content:?}"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let dup = || CliError::Parse {
            line,
            message: format!("duplicate key {key:?}"),
        };
        match key {
            "name" => {
                if name.replace(value.to_string()).is_some() {
                    return Err(dup());
                }
            }
            "breakpoints" => {
                if breakpoints.replace(parse_list(line, key, value)?).is_some() {
                    return Err(dup());
                }
            }
            "values" => {
                if values.replace(parse_list(line, key, value)?).is_some() {
                    return Err(dup());
                }
            }
            _ => match key.strip_prefix("meta.") {
                Some(k) if !k.is_empty() => {
                    if metadata.insert(k.to_string(), value.to_string()).is_some() {
                        return Err(dup());
                    }
                }
                _ => {
                    return Err(CliError::Parse {
                        line,
                        message: format!("unknown key {key:?} (expected name, breakpoints, values or meta.*)"),
                    })
                }
            },
        }
    }
    let missing = |field| CliError::InvalidSpec {
        field,
        message: "missing".into(),
    };
    let breakpoints = breakpoints.ok_or_else(|| missing("breakpoints"))?;
    let values = values.ok_or_else(|| missing("values"))?;
    if breakpoints.len() != values.len() {
        return Err(CliError::InvalidSpec {
            field: "values",
            message: format!("{} values for {} breakpoints", values.len(), breakpoints.len()),
        });
    }
    Ok(MapSpec {
        name,
        breakpoints,
        values,
        metadata,
        sha256: sha256_hex(text.as_bytes()),
    })
}

impl MapSpec {
    pub fn to_map(&self, limits: Limits) -> Result<PLCircleMap, CliError> {
        let lift = PLLift::new(self.breakpoints.clone(), self.values.clone()).map_err(pmk_core::Error::from)?;
        Ok(PLCircleMap::new(lift).with_limits(limits))
    }

    /// Canonical file text for a family member, so `--family` runs carry an
    /// input hash like file runs do.
    pub fn family(m: i64, k: i64, conjugate: bool) -> Result<MapSpec, CliError> {
        let text = if conjugate {
            format!("name = phi_neg_{m}_{k}\nbreakpoints = 0, 1/2, 1\nvalues = 0, {}, {}\n", -m, k - m)
        } else {
            format!("name = phi_{m}_{k}\nbreakpoints = 0, 1/2, 1\nvalues = 0, {m}, {}\n", m - k)
        };
        parse_spec(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pmk_core::rat;

    #[test]
    fn parses_comments_meta_and_brackets() {
        let s = parse_spec("# c\nname = t # trailing\nbreakpoints = [0, 1/2, 1]\nvalues = 0, 2, 0\nmeta.source = x\n").unwrap();
        assert_eq!(s.name.as_deref(), Some("t"));
        assert_eq!(s.breakpoints, vec![rat(0, 1), rat(1, 2), rat(1, 1)]);
        assert_eq!(s.metadata["source"], "x");
    }

    #[test]
    fn rejects_bad_rational_with_line() {
        match parse_spec("breakpoints = 0, 1/x, 1\nvalues = 0, 1, 0\n") {
            Err(CliError::Parse { line: 1, message }) => assert!(message.contains("breakpoints[1]")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_key_and_duplicates() {
        assert!(matches!(parse_spec("foo = 1\n"), Err(CliError::Parse { line: 1, .. })));
        assert!(matches!(
            parse_spec("values = 0\nvalues = 0\n"),
            Err(CliError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn family_text_matches_fixture() {
        let s = MapSpec::family(2, 2, false).unwrap();
        assert_eq!(s.values, vec![rat(0, 1), rat(2, 1), rat(0, 1)]);
        let n = MapSpec::family(2, 3, true).unwrap();
        assert_eq!(n.values, vec![rat(0, 1), rat(-2, 1), rat(1, 1)]);
    }
}
