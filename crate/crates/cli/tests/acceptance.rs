//! The fifteen acceptance criteria, each printed as one PASS/FAIL line.
//!
//! Lines go straight to stderr so they appear whether or not the test fails.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use conewit::cones::{margin, ConeSpec, Grid, Point};
use conewit::numerics::SymMat;
use conewit::operators::{Functional, LinearMap};
use conewit::verify::{run_example, selftest, Section};
use conewit::witnesses::{decompose_2x2, witness_from_image};

struct Ledger {
    failed: Vec<usize>,
}

impl Ledger {
    fn record(&mut self, n: usize, title: &str, pass: bool, detail: String) {
        let tag = if pass { "PASS" } else { "FAIL" };
        let line = format!("criterion {n:>2} {tag}  {title}: {detail}\n");
        std::io::stderr().write_all(line.as_bytes()).unwrap();
        if !pass {
            self.failed.push(n);
        }
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn section_detail(s: &Section) -> String {
    let ok = s.assertions.iter().filter(|a| a.pass).count();
    let mut d = format!("{ok}/{} assertions", s.assertions.len());
    for a in s.assertions.iter().filter(|a| !a.pass) {
        d.push_str(&format!("; failed `{}` (measured {}, expected {})", a.name, a.measured, a.expected));
    }
    d
}

fn example(name: &str) -> Section {
    run_example(name, 0).unwrap().sections.remove(0)
}

fn c(v: &[f64]) -> Point {
    Point::coords(v.to_vec())
}

fn criterion_4() -> (bool, String) {
    let cone = ConeSpec::Lorentz { d: 2 };
    let t = LinearMap::rank_one(LinearMap::Identity, Functional::spin_dual(vec![0.6, 0.8]), c(&[0.0, 0.0, 1.0]));
    let (x0, y) = (c(&[0.6, 0.8, 0.0]), c(&[0.6, 0.8, 1.0]));
    let image_exact = t.apply(&x0).unwrap() == y;
    let m = margin(&cone, &x0).unwrap();
    let back = t.apply_inverse(&y).unwrap().dist_inf(&x0).unwrap();
    let sec = example("spin-factor");
    let pass = image_exact && m == -1.0 && back <= 1e-12 && sec.passed();
    (pass, format!("T((xhat),0) exact: {image_exact}, margin {m}, inverse error {back:e}, scenario {}", section_detail(&sec)))
}

fn criterion_5() -> (bool, String) {
    let grid = Grid::linspace(0.0, 1.0, 5).unwrap();
    let cone = ConeSpec::GridNonneg { grid: grid.clone() };
    let f = Functional::TrapezoidIntegral { grid: grid.clone() };
    let x = Point::grid_function(grid.clone(), vec![0.0, 5.0, 0.0, -1.0, 0.0]).unwrap();
    let u = Point::grid_function(grid.clone(), vec![1.0; 5]).unwrap();
    let t = LinearMap::rank_one(LinearMap::Identity, f.clone(), u);
    let fx = f.eval(&x).unwrap();
    let tx = t.apply(&x).unwrap();
    let (mx, mt) = (margin(&cone, &x).unwrap(), margin(&cone, &tx).unwrap());
    let pass = fx == 1.0 && mx == -1.0 && tx.raw() == [1.0, 6.0, 1.0, 0.0, 1.0] && mt == 0.0;
    (pass, format!("f(x) = {fx}, x margin {mx}, T(x) = {tx}, T(x) margin {mt}"))
}

fn criterion_6() -> (bool, String) {
    let d = Point::matrix(SymMat::diag(&[-0.5, 1.0, 1.0]));
    let (psd, cop) = (ConeSpec::Psd { n: 3 }, ConeSpec::Copositive { n: 3 });
    let t = LinearMap::rank_one(
        LinearMap::Identity,
        Functional::TraceForm { b: SymMat::identity(3) },
        Point::matrix(SymMat::identity(3)),
    );
    let td = t.apply(&d).unwrap();
    let expected = Point::matrix(SymMat::diag(&[1.0, 2.5, 2.5]));
    let (dp, dc) = (margin(&psd, &d).unwrap(), margin(&cop, &d).unwrap());
    let tp = margin(&psd, &td).unwrap();
    let w = witness_from_image(&t, &psd, &td).unwrap();
    let recovered = w.found && w.preimage_x.as_ref().unwrap().dist_inf(&d).unwrap() <= 1e-12;
    let pass = (dp + 0.5).abs() <= 1e-12 && (dc + 0.5).abs() <= 1e-12 && td == expected && (tp - 1.0).abs() <= 1e-12 && recovered;
    (pass, format!("D margins psd {dp}, copositive {dc}; T(D) = D + 1.5I: {}; T(D) psd margin {tp}; witness recovers D: {recovered}", td == expected))
}

fn criterion_7() -> (bool, String) {
    let n = 8;
    let cone = ConeSpec::Orthant { n };
    let t = LinearMap::rank_one(LinearMap::Identity, Functional::covector(vec![1.0; n]), Point::unit(n, 1));
    let x = t.apply_inverse(&Point::unit(n, 0)).unwrap();
    let mut want = vec![0.0; n];
    want[0] = 1.0;
    want[1] = -0.5;
    let m = margin(&cone, &x).unwrap();
    (x.raw() == want.as_slice() && m == -0.5, format!("T^-1 e1 = {x}, margin {m}"))
}

fn criterion_8() -> (bool, String) {
    let grid = Grid::linspace(-2.0, 2.0, 9).unwrap();
    let inv_e = (-1.0f64).exp();
    let x = Point::grid_function(grid.clone(), vec![0.0, 0.0, 0.0, -inv_e, 1.0, -inv_e, 0.0, 0.0, 0.0]).unwrap();
    let m = margin(&ConeSpec::GridNonneg { grid }, &x).unwrap();
    let sec = example("c0-real-line");
    let pass = (m + (-1.0f64).exp()).abs() <= 1e-12 && sec.passed();
    (pass, format!("x margin {m}; scenario {}", section_detail(&sec)))
}

fn criterion_9() -> (bool, String) {
    match decompose_2x2([[1.0, 3.0], [2.0, 4.0]]) {
        Ok(dec) => {
            let [id, sw] = &dec.cases;
            let certificate = !id.feasible && id.required_product == 6.0 && id.bound == 4.0 && !sw.feasible;
            let grid = dec.grid_min_residual();
            let pass = !dec.feasible() && certificate && grid > 0.05;
            let detail = format!(
                "infeasible: {}; identity {} vs < {} feasible {}; swap {} vs < {} feasible {}; grid min residual {grid}; factorization {:?}",
                !dec.feasible(),
                id.required_product,
                id.bound,
                id.feasible,
                sw.required_product,
                sw.bound,
                sw.feasible,
                dec.factorization.as_ref().map(|f| (f.d, f.u, f.v))
            );
            (pass, detail)
        }
        Err(e) => (false, format!("error: {e}")),
    }
}

fn criterion_10() -> (bool, String) {
    let n = 4;
    let t = LinearMap::rank_one(LinearMap::Identity, Functional::covector(Point::unit(n, 0).raw().to_vec()), Point::unit(n, 0));
    let mut exact = true;
    for i in 0..n {
        let col = t.apply_inverse(&Point::unit(n, i)).unwrap();
        let mut want = vec![0.0; n];
        want[i] = if i == 0 { 0.5 } else { 1.0 };
        exact &= col.raw() == want.as_slice();
    }
    let (orth, ray) = (example("orthant-automorphism"), example("ray-cone"));
    let pass = exact && orth.passed() && ray.passed();
    (pass, format!("inverse diag(1/2,1,1,1) exact: {exact}; orthant {}; ray {}", section_detail(&orth), section_detail(&ray)))
}

fn run_binary() -> (Vec<u8>, Option<i32>, Duration) {
    let (out, dt) = timed(|| Command::new(env!("CARGO_BIN_EXE_conewit")).args(["selftest", "--seed", "0"]).output().unwrap());
    (out.stdout, out.status.code(), dt)
}

#[test]
fn acceptance_criteria() {
    let mut l = Ledger { failed: Vec::new() };

    let (s, dt) = timed(|| selftest::inverse_exactness(0));
    l.record(1, "inverse exactness", s.passed() && dt <= Duration::from_secs(10), format!("{} in {:.2} s (limit 10 s)", section_detail(&s), dt.as_secs_f64()));

    let s = selftest::positivity(0);
    l.record(2, "positivity of constructed operators", s.passed(), section_detail(&s));

    let (s, dt) = timed(|| selftest::witness_coverage(0));
    l.record(3, "witness coverage", s.passed() && dt <= Duration::from_secs(30), format!("{} in {:.2} s (limit 30 s)", section_detail(&s), dt.as_secs_f64()));

    let (p, d) = criterion_4();
    l.record(4, "spin factor golden values", p, d);
    let (p, d) = criterion_5();
    l.record(5, "continuous functions golden values", p, d);
    let (p, d) = criterion_6();
    l.record(6, "copositive and PSD golden values", p, d);
    let (p, d) = criterion_7();
    l.record(7, "sequence space truncation golden values", p, d);
    let (p, d) = criterion_8();
    l.record(8, "C0 real line golden values", p, d);
    let (p, d) = criterion_9();
    l.record(9, "2x2 decomposition infeasibility", p, d);
    let (p, d) = criterion_10();
    l.record(10, "negative controls", p, d);

    let s = selftest::scaling(0);
    l.record(11, "scaling family N = 1", s.passed(), section_detail(&s));

    let s = selftest::bisection(0);
    l.record(12, "boundary bisection", s.passed(), section_detail(&s));

    let (s, dt) = timed(|| selftest::copositivity_oracle(0));
    l.record(13, "copositivity oracle equivalence", s.passed() && dt <= Duration::from_secs(20), format!("{} in {:.2} s (limit 20 s)", section_detail(&s), dt.as_secs_f64()));

    let r = selftest::property_suites(0);
    let (ok, total) = r.counts();
    l.record(14, "property suites", r.passed(), format!("{ok}/{total} assertions over {} sections", r.sections.len()));

    let (out1, code1, dt1) = run_binary();
    let (out2, code2, dt2) = run_binary();
    let identical = out1 == out2;
    let fast = dt1.max(dt2) <= Duration::from_secs(90);
    let pass = identical && fast && code1 == Some(0) && code2 == Some(0);
    l.record(
        15,
        "selftest",
        pass,
        format!(
            "exit codes {code1:?}/{code2:?} (need 0), byte-identical: {identical}, runtimes {:.2} s/{:.2} s (limit 90 s)",
            dt1.as_secs_f64(),
            dt2.as_secs_f64()
        ),
    );

    assert!(l.failed.is_empty(), "failed criteria: {:?}", l.failed);
}

mod cli {
    use std::path::PathBuf;
    use std::process::{Command, Output};

    fn config(name: &str) -> String {
        let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
        root.to_str().unwrap().to_owned()
    }

    fn run(args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_conewit")).args(args).output().unwrap()
    }

    #[test]
    fn bad_config_exits_two_with_error_code() {
        let out = run(&["verify", "--config", &config("bad.toml")]);
        assert_eq!(out.status.code(), Some(2));
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains("NotInCone"), "{err}");
    }

    #[test]
    fn lorentz_witness_found() {
        let out = run(&["witness", "--config", &config("lorentz.toml")]);
        assert_eq!(out.status.code(), Some(0));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["found"], true);
    }

    #[test]
    fn orthant_control_passes_without_witness() {
        let out = run(&["verify", "--config", &config("orthant-control.toml")]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    }

    #[test]
    fn text_format_from_config() {
        let out = run(&["verify", "--config", &config("psd-congruence.toml")]);
        assert_eq!(out.status.code(), Some(0));
        assert!(serde_json::from_slice::<serde_json::Value>(&out.stdout).is_err());
    }

    #[test]
    fn flag_overrides_config_format() {
        let out = run(&["--format", "json", "verify", "--config", &config("psd-congruence.toml")]);
        assert_eq!(out.status.code(), Some(0));
        serde_json::from_slice::<serde_json::Value>(&out.stdout).unwrap();
    }

    #[test]
    fn unknown_example_and_usage_errors_exit_two() {
        assert_eq!(run(&["examples", "--name", "no-such-example"]).status.code(), Some(2));
        assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
        assert_eq!(run(&["verify"]).status.code(), Some(2));
        assert_eq!(run(&["verify", "--config", "/nonexistent/x.toml"]).status.code(), Some(2));
    }

    #[test]
    fn single_example_passes() {
        let out = run(&["examples", "--name", "spin-factor"]);
        assert_eq!(out.status.code(), Some(0));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["seed"], 0);
    }
}
