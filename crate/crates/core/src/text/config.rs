//! Flat `key = value` scenario files with `[scenario]` and `[expect]` sections.
//!
//! ```text
//! # Lorentz cone, spin-factor functional
//! [scenario]
//! name = spin
//! cone = lorentz:2
//! S = identity
//! f = spindual:[0.6,0.8]
//! u = point:[0,0,1]
//! seed = 1
//!
//! [expect]
//! witness = found
//! positive = true
//! ```
//!
//! Keys before any section header belong to `[scenario]`. Values may be
//! wrapped in double quotes. `[expect]` keys may repeat.

use std::collections::BTreeMap;

use super::cursor::Cursor;
use super::{cone, functional, map, point};
use crate::cones::{ConeSpec, MembershipClass, Point};
use crate::error::{Error, Result};
use crate::verify::{Expectation, OutputFormat, Scenario, DEFAULT_BUDGET, DEFAULT_TOL};

/// A parsed scenario file. Optional run settings stay `None` when absent so
/// command-line flags can take precedence.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Budget and tolerance are the file's values or the defaults.
    pub scenario: Scenario,
    pub seed: Option<u64>,
    pub budget: Option<usize>,
    pub tol: Option<f64>,
    pub format: Option<OutputFormat>,
    pub csv: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Scenario,
    Expect,
}

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    key_col: usize,
    value: String,
    line: usize,
    col: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Drop a trailing `#` comment that is not inside double quotes.
fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, ch) in line.char_indices() {
        match ch {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn column_of(line: &str, byte: usize) -> usize {
    line[..byte].chars().count() + 1
}

fn unquote(e: &Entry) -> Result<(String, usize)> {
    let v = e.value.as_str();
    if let Some(rest) = v.strip_prefix('"') {
        let inner = rest
            .strip_suffix('"')
            .ok_or_else(|| err(e.line, e.col, "unterminated quoted value"))?;
        if inner.contains('"') {
            return Err(err(e.line, e.col, "stray quote inside a quoted value"));
        }
        return Ok((inner.to_string(), e.col + 1));
    }
    Ok((v.to_string(), e.col))
}

/// Run `f` on the entry's value and require it to consume everything.
fn with_cursor<T>(e: &Entry, f: impl FnOnce(&mut Cursor) -> Result<T>) -> Result<T> {
    let (v, col) = unquote(e)?;
    let mut c = Cursor::new(&v, e.line, col);
    let out = f(&mut c)?;
    c.finish()?;
    Ok(out)
}

fn word(e: &Entry) -> Result<String> {
    let (v, col) = unquote(e)?;
    if v.is_empty() {
        return Err(err(e.line, col, format!("`{}` needs a value", e.key)));
    }
    Ok(v)
}

fn boolean(e: &Entry) -> Result<bool> {
    match word(e)?.as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(err(e.line, e.col, format!("expected true or false, found `{other}`"))),
    }
}

fn positive_number(e: &Entry) -> Result<f64> {
    let at_err = |m: String| err(e.line, e.col, m);
    let v = with_cursor(e, |c| c.number())?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(at_err(format!("`{}` must be positive", e.key)))
    }
}

fn integer<T: std::str::FromStr>(e: &Entry) -> Result<T> {
    let v = word(e)?;
    v.parse()
        .map_err(|_| err(e.line, e.col, format!("`{}` must be a nonnegative integer, found `{v}`", e.key)))
}

fn split_lines(text: &str) -> Result<Vec<(Section, Entry)>> {
    let mut section = Section::Scenario;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = strip_comment(raw);
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        let lead = body.len() - body.trim_start().len();
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| err(line, column_of(raw, lead), "section header needs a closing `]`"))?;
            section = match name.trim() {
                "scenario" => Section::Scenario,
                "expect" => Section::Expect,
                other => return Err(err(line, column_of(raw, lead), format!("unknown section `[{other}]`"))),
            };
            continue;
        }
        let eq = body
            .find('=')
            .ok_or_else(|| err(line, column_of(raw, lead), "expected `key = value`"))?;
        let key = body[..eq].trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(err(line, column_of(raw, lead), format!("invalid key `{key}`")));
        }
        let after = &body[eq + 1..];
        let vlead = after.len() - after.trim_start().len();
        let value = after.trim().to_string();
        out.push((
            section,
            Entry {
                key: key.to_string(),
                key_col: column_of(raw, lead),
                value,
                line,
                col: column_of(raw, eq + 1 + vlead),
            },
        ));
    }
    Ok(out)
}

const SCENARIO_KEYS: [&str; 10] = ["name", "cone", "S", "f", "u", "seed", "budget", "tol", "format", "csv"];

fn expectation(e: &Entry, cone: &ConeSpec) -> Result<Expectation> {
    let pt = |e: &Entry| with_cursor(e, |c| point(c, cone));
    let class_of = |k: &str| match k.trim_start_matches("inverse_") {
        "interior" => MembershipClass::Interior,
        "boundary" => MembershipClass::Boundary,
        _ => MembershipClass::Exterior,
    };
    Ok(match e.key.as_str() {
        "witness" => match word(e)?.as_str() {
            "found" => Expectation::Witness { found: true },
            "not_found" => Expectation::Witness { found: false },
            other => return Err(err(e.line, e.col, format!("expected found or not_found, found `{other}`"))),
        },
        "positive" => Expectation::Positive(boolean(e)?),
        "inverse_positive" => Expectation::InversePositive(boolean(e)?),
        "inverse_residual_max" => Expectation::InverseResidualMax(positive_number(e)?),
        "u_interior" => Expectation::UInterior(boolean(e)?),
        k @ ("interior" | "boundary" | "exterior") => Expectation::Class {
            point: pt(e)?,
            class: class_of(k),
        },
        k @ ("inverse_interior" | "inverse_boundary" | "inverse_exterior") => Expectation::PreimageClass {
            y: pt(e)?,
            class: class_of(k),
        },
        "witness_from_image" => Expectation::WitnessFromImage { y: pt(e)?, x: None },
        other => return Err(err(e.line, e.key_col, format!("unknown expectation `{other}`"))),
    })
}

/// Parse a scenario file. Errors carry the line and column of the offending
/// key or value.
pub fn parse_config(text: &str) -> Result<Config> {
    let entries = split_lines(text)?;
    let mut scenario: BTreeMap<&str, &Entry> = BTreeMap::new();
    let mut expects = Vec::new();
    for (section, e) in &entries {
        match section {
            Section::Scenario => {
                let Some(key) = SCENARIO_KEYS.iter().find(|k| **k == e.key) else {
                    return Err(err(e.line, e.key_col, format!("unknown key `{}`", e.key)));
                };
                if scenario.insert(key, e).is_some() {
                    return Err(err(e.line, e.key_col, format!("duplicate key `{}`", e.key)));
                }
            }
            Section::Expect => expects.push(e),
        }
    }
    let end_line = text.lines().count().max(1);
    let required = |k: &str| {
        scenario
            .get(k)
            .copied()
            .ok_or_else(|| err(end_line, 1, format!("missing required key `{k}`")))
    };
    let name = match scenario.get("name") {
        Some(e) => word(e)?,
        None => "scenario".to_string(),
    };
    let cone = with_cursor(required("cone")?, cone)?;
    let s = with_cursor(required("S")?, |c| map(c, &cone))?;
    let f = with_cursor(required("f")?, |c| functional(c, &cone))?;
    let u: Point = with_cursor(required("u")?, |c| point(c, &cone))?;
    let seed = scenario.get("seed").map(|e| integer::<u64>(e)).transpose()?;
    let budget = scenario.get("budget").map(|e| integer::<usize>(e)).transpose()?;
    let tol = scenario.get("tol").map(|e| positive_number(e)).transpose()?;
    let format = scenario
        .get("format")
        .map(|e| word(e)?.parse::<OutputFormat>().map_err(|m| err(e.line, e.col, m)))
        .transpose()?;
    let csv = scenario.get("csv").map(|e| word(e)).transpose()?;
    let mut sc = Scenario::new(name, cone.clone(), s, f, u);
    sc.budget = budget.unwrap_or(DEFAULT_BUDGET);
    sc.tol = tol.unwrap_or(DEFAULT_TOL);
    for e in expects {
        sc.expectations.push(expectation(e, &cone)?);
    }
    Ok(Config {
        scenario: sc,
        seed,
        budget,
        tol,
        format,
        csv,
    })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{Functional, LinearMap};

    const LORENTZ: &str = "\
# spin factor
[scenario]
name = \"spin # one\"
cone = lorentz:2
S = identity
f = spindual:[0.6,0.8]   # unit direction
u = point:[0,0,1]
seed = 1

[expect]
witness = found
positive = true
exterior = point:[0.6,0.8,0]
exterior = point:[1,0,0]
";

    #[test]
    fn parses_a_full_file() {
        let c = parse_config(LORENTZ).unwrap();
        assert_eq!(c.scenario.name, "spin # one");
        assert_eq!(c.scenario.cone, ConeSpec::Lorentz { d: 2 });
        assert_eq!(c.scenario.s, LinearMap::Identity);
        assert_eq!(c.scenario.f, Functional::spin_dual(vec![0.6, 0.8]));
        assert_eq!(c.seed, Some(1));
        assert_eq!(c.budget, None);
        assert_eq!(c.scenario.budget, DEFAULT_BUDGET);
        assert_eq!(c.scenario.expectations.len(), 4);
        assert_eq!(c.scenario.expectations[0], Expectation::Witness { found: true });
    }

    fn position(text: &str) -> (usize, usize) {
        match parse_config(text) {
            Err(Error::Parse { line, column, .. }) => (line, column),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn errors_point_at_values() {
        let bad = LORENTZ.replace("f = spindual:[0.6,0.8]", "f = spindual:[0.6,x]");
        assert_eq!(position(&bad), (6, 19));
        let bad = LORENTZ.replace("u = point:[0,0,1]", "u = point:[0,1]");
        assert_eq!(position(&bad), (7, 11));
        let bad = LORENTZ.replace("seed = 1", "seed = -1");
        assert_eq!(position(&bad), (8, 8));
        let bad = LORENTZ.replace("positive = true", "positive = yes");
        assert_eq!(position(&bad), (12, 12));
    }

    #[test]
    fn structural_errors() {
        assert_eq!(position("cone = lex\ncone = lex\n"), (2, 1));
        assert_eq!(position("colour = red\n"), (1, 1));
        assert_eq!(position("[other]\n"), (1, 1));
        assert_eq!(position("  just words\n"), (1, 3));
        assert!(matches!(parse_config("cone = lex\n"), Err(Error::Parse { .. })));
        assert_eq!(position("name = \"open\ncone=lex\n"), (1, 8));
    }

    #[test]
    fn settings_are_optional_and_typed() {
        let text = "cone=orthant:2\nS=identity\nf=covector:[1,1]\nu=point:[1,1]\nformat=json\ntol=1e-7\nbudget=50\ncsv=out.csv\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.format, Some(OutputFormat::Json));
        assert_eq!(c.tol, Some(1e-7));
        assert_eq!(c.scenario.budget, 50);
        assert_eq!(c.csv.as_deref(), Some("out.csv"));
        assert!(parse_config(&text.replace("json", "xml")).is_err());
        assert!(parse_config(&text.replace("1e-7", "0")).is_err());
    }
}
