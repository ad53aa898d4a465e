use std::fmt::{self, Display, Write as _};
use std::str::FromStr;
use std::time::Duration;

use serde::Serialize;

use crate::error::Result;

/// One checked claim: what was expected, what was measured, and the verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub expected: String,
    pub measured: String,
    pub pass: bool,
}

/// Assertions of one scenario or property group.
#[derive(Debug, Clone, Serialize)]
pub struct Section {
    pub name: String,
    pub assertions: Vec<Assertion>,
    pub notes: Vec<String>,
    /// Wall time; kept out of every serialized form so output stays reproducible.
    #[serde(skip)]
    pub runtime: Duration,
}

/// Shortest round-trip form for ordinary magnitudes, scientific otherwise.
pub(crate) fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e7).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl Section {
    pub fn new(name: impl Into<String>) -> Self {
        Section {
            name: name.into(),
            assertions: Vec::new(),
            notes: Vec::new(),
            runtime: Duration::ZERO,
        }
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn check(&mut self, name: impl Into<String>, expected: impl Display, measured: impl Display, pass: bool) {
        self.assertions.push(Assertion {
            name: name.into(),
            expected: expected.to_string(),
            measured: measured.to_string(),
            pass,
        });
    }

    pub fn check_true(&mut self, name: impl Into<String>, measured: bool) {
        self.check(name, true, measured, measured);
    }

    pub fn check_eq<T: Display + PartialEq>(&mut self, name: impl Into<String>, expected: T, measured: T) {
        let pass = expected == measured;
        self.check(name, expected, measured, pass);
    }

    pub fn check_le(&mut self, name: impl Into<String>, measured: f64, bound: f64) {
        self.check(name, format!("<= {}", num(bound)), num(measured), measured <= bound);
    }

    pub fn check_lt(&mut self, name: impl Into<String>, measured: f64, bound: f64) {
        self.check(name, format!("< {}", num(bound)), num(measured), measured < bound);
    }

    pub fn check_ge(&mut self, name: impl Into<String>, measured: f64, bound: f64) {
        self.check(name, format!(">= {}", num(bound)), num(measured), measured >= bound);
    }

    pub fn check_gt(&mut self, name: impl Into<String>, measured: f64, bound: f64) {
        self.check(name, format!("> {}", num(bound)), num(measured), measured > bound);
    }

    pub fn check_close(&mut self, name: impl Into<String>, measured: f64, target: f64, tol: f64) {
        let pass = (measured - target).abs() <= tol;
        self.check(name, format!("{} +- {}", num(target), num(tol)), num(measured), pass);
    }

    /// Record `r` as a failure when it is an error, otherwise hand it to `f`.
    pub fn check_with<T>(&mut self, name: &str, expected: impl Display, r: Result<T>, f: impl FnOnce(&mut Section, T)) {
        match r {
            Ok(v) => f(self, v),
            Err(e) => self.check(name, expected, format!("error: {e}"), false),
        }
    }
}

/// Sections from one run, sorted by name.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub seed: u64,
    pub sections: Vec<Section>,
    #[serde(skip)]
    pub runtime: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown output format `{other}` (expected text or json)")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Text => "text",
            OutputFormat::Json => "json",
        })
    }
}

impl Report {
    pub fn new(seed: u64, mut sections: Vec<Section>) -> Self {
        sections.sort_by(|a, b| a.name.cmp(&b.name));
        let runtime = sections.iter().map(|s| s.runtime).sum();
        Report { seed, sections, runtime }
    }

    pub fn merge(mut self, other: Report) -> Report {
        self.sections.extend(other.sections);
        Report::new(self.seed, self.sections)
    }

    pub fn passed(&self) -> bool {
        self.sections.iter().all(Section::passed)
    }

    /// `(passed, total)` assertion counts.
    pub fn counts(&self) -> (usize, usize) {
        let all = self.sections.iter().flat_map(|s| &s.assertions);
        let total = all.clone().count();
        (all.filter(|a| a.pass).count(), total)
    }

    pub fn failures(&self) -> Vec<(&str, &Assertion)> {
        self.sections
            .iter()
            .flat_map(|s| s.assertions.iter().filter(|a| !a.pass).map(move |a| (s.name.as_str(), a)))
            .collect()
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "seed: {}", self.seed).unwrap();
        for s in &self.sections {
            let ok = s.assertions.iter().filter(|a| a.pass).count();
            let tag = if s.passed() { "PASS" } else { "FAIL" };
            writeln!(out, "{tag}  {} ({ok}/{})", s.name, s.assertions.len()).unwrap();
            for a in &s.assertions {
                let tag = if a.pass { "ok  " } else { "FAIL" };
                writeln!(out, "    {tag}  {}: measured {}, expected {}", a.name, a.measured, a.expected).unwrap();
            }
            for n in &s.notes {
                writeln!(out, "    note: {n}").unwrap();
            }
        }
        let (ok, total) = self.counts();
        writeln!(out, "summary: {ok}/{total} assertions passed, {} failed", total - ok).unwrap();
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => self.to_text(),
            OutputFormat::Json => {
                let mut s = self.to_json();
                s.push('\n');
                s
            }
        }
    }

    /// Columns: scenario, assertion, expected, measured, pass.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["scenario", "assertion", "expected", "measured", "pass"]).unwrap();
        for s in &self.sections {
            for a in &s.assertions {
                let pass = if a.pass { "true" } else { "false" };
                w.write_record([s.name.as_str(), &a.name, &a.expected, &a.measured, pass]).unwrap();
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 input")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut b = Section::new("b");
        b.check_le("small", 1e-12, 1e-9);
        b.check_close("value, with comma", 0.5, 0.5, 0.0);
        let mut a = Section::new("a");
        a.check_eq("count", 3, 4);
        a.note("failing on purpose");
        Report::new(7, vec![b, a])
    }

    #[test]
    fn sections_sorted_and_counted() {
        let r = sample();
        assert_eq!(r.sections[0].name, "a");
        assert_eq!(r.counts(), (2, 3));
        assert!(!r.passed());
        assert_eq!(r.failures().len(), 1);
    }

    #[test]
    fn csv_quotes_fields() {
        let csv = sample().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("scenario,assertion,expected,measured,pass"));
        assert_eq!(lines.next(), Some("a,count,3,4,false"));
        assert!(csv.contains("\"value, with comma\""));
    }

    #[test]
    fn json_omits_runtime() {
        let mut r = sample();
        r.sections[0].runtime = Duration::from_secs(3);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert!(v.get("runtime").is_none());
        assert!(v["sections"][0].get("runtime").is_none());
        assert_eq!(v["seed"], 7);
    }

    #[test]
    fn number_format() {
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(1e-12), "1e-12");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(-0.36787944117144233), "-0.36787944117144233");
    }
}
