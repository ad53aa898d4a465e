use conewit::verify::{run_example, run_paper_examples, run_property_suite, EXAMPLE_NAMES};
use conewit::cones::ConeSpec;

#[test]
fn example_reports_are_reproducible_and_sorted() {
    let a = run_paper_examples(5);
    let b = run_paper_examples(5);
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.to_csv(), b.to_csv());
    let names: Vec<&str> = a.sections.iter().map(|s| s.name.as_str()).collect();
    assert_eq!(names, EXAMPLE_NAMES);
}

#[test]
fn json_schema_is_stable() {
    let r = run_example("spin-factor", 1).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(v["seed"], 1);
    let s = &v["sections"][0];
    assert_eq!(s["name"], "spin-factor");
    for a in s["assertions"].as_array().unwrap() {
        for key in ["name", "expected", "measured", "pass"] {
            assert!(a.get(key).is_some());
        }
    }
}

#[test]
fn csv_has_one_row_per_assertion() {
    let r = run_property_suite(&ConeSpec::Orthant { n: 3 }, 2);
    let (_, total) = r.counts();
    let mut rows = csv_rows(&r.to_csv());
    assert_eq!(rows.remove(0), ["scenario", "assertion", "expected", "measured", "pass"]);
    assert_eq!(rows.len(), total);
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let mut fields = Vec::new();
        let mut cur = String::new();
        let mut quoted = false;
        let mut chars = line.chars().peekable();
        while let Some(c) = chars.next() {
            match c {
                '"' if quoted && chars.peek() == Some(&'"') => {
                    cur.push('"');
                    chars.next();
                }
                '"' => quoted = !quoted,
                ',' if !quoted => fields.push(std::mem::take(&mut cur)),
                _ => cur.push(c),
            }
        }
        fields.push(cur);
        out.push(fields);
    }
    out
}
