use std::time::Instant;

use super::report::{num, Report, Section};
use crate::cones::{classify, margin, ConeSpec, MembershipClass, Point};
use crate::error::Result;
use crate::operators::{
    inverse_residual, is_positive_inverse, is_positive_map, rank_one_perturb, reverse_residual, Functional, LinearMap,
    Validation,
};
use crate::rng::RngStream;
use crate::witnesses::{nonpositive_inverse_witness, witness_from_image};

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_BUDGET: usize = 10_000;
pub const DEFAULT_TOL: f64 = 1e-9;
/// Cone samples drawn by the positivity expectations.
pub const POSITIVITY_SAMPLES: usize = 10_000;
/// Ambient samples drawn by the inverse-residual expectation, per direction.
pub const RESIDUAL_SAMPLES: usize = 100;

/// A machine-checkable claim about `T(x) = Sx + f(x)u` on a scenario's cone.
#[derive(Debug, Clone, PartialEq)]
pub enum Expectation {
    /// Sampled positivity of `T`.
    Positive(bool),
    /// Sampled positivity of `T⁻¹`.
    InversePositive(bool),
    /// Both composition residuals stay below the bound.
    InverseResidualMax(f64),
    /// Outcome of the witness cascade within the scenario budget.
    Witness { found: bool },
    UInterior(bool),
    /// Membership class of a point.
    Class { point: Point, class: MembershipClass },
    /// Membership class of `T⁻¹y`.
    PreimageClass { y: Point, class: MembershipClass },
    /// Margin of a point, under the scenario cone or another one on the same space.
    Margin { point: Point, value: f64, tol: f64, under: Option<ConeSpec> },
    Image { x: Point, y: Point, tol: f64 },
    Preimage { y: Point, x: Point, tol: f64 },
    FunctionalValue { point: Point, value: f64, tol: f64 },
    /// `y` alone is a verified witness; optionally its preimage is `x` to 1e-12.
    WitnessFromImage { y: Point, x: Option<Point> },
}

fn class_name(c: MembershipClass) -> &'static str {
    match c {
        MembershipClass::Interior => "interior",
        MembershipClass::Boundary => "boundary",
        MembershipClass::Exterior => "exterior",
    }
}

impl Expectation {
    pub fn name(&self) -> String {
        match self {
            Expectation::Positive(_) => "positive".into(),
            Expectation::InversePositive(_) => "inverse_positive".into(),
            Expectation::InverseResidualMax(_) => "inverse_residual".into(),
            Expectation::Witness { .. } => "witness".into(),
            Expectation::UInterior(_) => "u_interior".into(),
            Expectation::Class { point, .. } => format!("class({point})"),
            Expectation::PreimageClass { y, .. } => format!("preimage_class({y})"),
            Expectation::Margin { point, under, .. } => match under {
                Some(c) => format!("margin({point}) under {c}"),
                None => format!("margin({point})"),
            },
            Expectation::Image { x, .. } => format!("T({x})"),
            Expectation::Preimage { y, .. } => format!("T^-1({y})"),
            Expectation::FunctionalValue { point, .. } => format!("f({point})"),
            Expectation::WitnessFromImage { y, .. } => format!("witness_from_image({y})"),
        }
    }
}

/// Operator data plus the claims to check against it.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub cone: ConeSpec,
    pub s: LinearMap,
    pub f: Functional,
    pub u: Point,
    pub budget: usize,
    /// Membership tolerance of the positivity checks.
    pub tol: f64,
    pub expectations: Vec<Expectation>,
}

impl Scenario {
    pub fn new(name: impl Into<String>, cone: ConeSpec, s: LinearMap, f: Functional, u: Point) -> Self {
        Scenario {
            name: name.into(),
            cone,
            s,
            f,
            u,
            budget: DEFAULT_BUDGET,
            tol: DEFAULT_TOL,
            expectations: Vec::new(),
        }
    }

    pub fn expect(mut self, e: Expectation) -> Self {
        self.expectations.push(e);
        self
    }

    fn rng(&self, seed: u64) -> RngStream {
        RngStream::new(seed).split_named(&self.name)
    }

    /// Validate the data and build `T`; the same draws [`run_scenario`] uses.
    pub fn build(&self, seed: u64) -> Result<(LinearMap, Validation)> {
        rank_one_perturb(&self.s, &self.f, &self.u, &self.cone, &mut self.rng(seed).split(0))
    }
}

/// Build `T` and check every expectation. Construction errors become a
/// failed `construction` assertion rather than an error.
pub fn run_scenario(s: &Scenario, seed: u64) -> Report {
    Report::new(seed, vec![scenario_section(s, seed)])
}

pub(crate) fn scenario_section(s: &Scenario, seed: u64) -> Section {
    let start = Instant::now();
    let mut sec = Section::new(s.name.clone());
    let rng = s.rng(seed);
    match s.build(seed) {
        Err(e) => sec.check("construction", "ok", format!("error: {e}"), false),
        Ok((t, validation)) => {
            sec.check("construction", "ok", "ok", true);
            for (i, e) in s.expectations.iter().enumerate() {
                let mut r = rng.split(i as u64 + 1);
                check_expectation(&mut sec, s, &t, &validation, e, &mut r);
            }
        }
    }
    sec.runtime = start.elapsed();
    sec
}

fn check_expectation(
    sec: &mut Section,
    s: &Scenario,
    t: &LinearMap,
    validation: &Validation,
    e: &Expectation,
    rng: &mut RngStream,
) {
    let name = e.name();
    let cone = &s.cone;
    match e {
        Expectation::Positive(want) | Expectation::InversePositive(want) => {
            let r = if let Expectation::Positive(_) = e {
                is_positive_map(t, cone, rng, POSITIVITY_SAMPLES, s.tol)
            } else {
                is_positive_inverse(t, cone, rng, POSITIVITY_SAMPLES, s.tol)
            };
            sec.check_with(&name, want, r, |sec, c| {
                let measured = format!("{} (worst margin {} over {} samples)", c.positive, num(c.worst_margin), c.samples);
                sec.check(name.clone(), want, measured, c.positive == *want);
            });
        }
        Expectation::InverseResidualMax(bound) => {
            let r = inverse_residual(t, cone, rng, RESIDUAL_SAMPLES)
                .and_then(|a| Ok(a.max(reverse_residual(t, cone, rng, RESIDUAL_SAMPLES)?)));
            sec.check_with(&name, format!("<= {}", num(*bound)), r, |sec, v| sec.check_le(name.clone(), v, *bound));
        }
        Expectation::Witness { found } => {
            let want = if *found { "found" } else { "not found" };
            let r = nonpositive_inverse_witness(t, cone, rng, s.budget);
            sec.check_with(&name, want, r, |sec, w| {
                let measured = match (w.found, w.strategy) {
                    (true, Some(st)) => format!(
                        "found by {} (y margin {}, x margin {})",
                        st.name(),
                        num(w.y_margin.unwrap_or(f64::NAN)),
                        num(w.x_margin.unwrap_or(f64::NAN))
                    ),
                    _ => format!("not found after {} attempts", w.attempts),
                };
                let pass = w.found == *found && w.is_sound(t, cone);
                sec.check(name.clone(), want, measured, pass);
            });
        }
        Expectation::UInterior(want) => sec.check_eq(name, *want, validation.u_interior),
        Expectation::Class { point, class } => {
            let r = classify(cone, point, s.tol);
            sec.check_with(&name, class_name(*class), r, |sec, v| {
                sec.check(name.clone(), class_name(*class), class_name(v.class), v.class == *class)
            });
        }
        Expectation::PreimageClass { y, class } => {
            let r = t.apply_inverse(y).and_then(|x| classify(cone, &x, s.tol));
            sec.check_with(&name, class_name(*class), r, |sec, v| {
                sec.check(name.clone(), class_name(*class), class_name(v.class), v.class == *class)
            });
        }
        Expectation::Margin { point, value, tol, under } => {
            let r = margin(under.as_ref().unwrap_or(cone), point);
            sec.check_with(&name, num(*value), r, |sec, m| sec.check_close(name.clone(), m, *value, *tol));
        }
        Expectation::Image { x, y, tol } => {
            let r = t.apply(x).and_then(|tx| Ok((tx.dist_inf(y)?, tx)));
            sec.check_with(&name, y, r, |sec, (d, tx)| sec.check(name.clone(), y, &tx, d <= *tol));
        }
        Expectation::Preimage { y, x, tol } => {
            let r = t.apply_inverse(y).and_then(|ty| Ok((ty.dist_inf(x)?, ty)));
            sec.check_with(&name, x, r, |sec, (d, ty)| sec.check(name.clone(), x, &ty, d <= *tol));
        }
        Expectation::FunctionalValue { point, value, tol } => {
            let r = s.f.eval(point);
            sec.check_with(&name, num(*value), r, |sec, v| sec.check_close(name.clone(), v, *value, *tol));
        }
        Expectation::WitnessFromImage { y, x } => {
            let r = witness_from_image(t, cone, y);
            sec.check_with(&name, "found", r, |sec, w| {
                let matches = match (x, &w.preimage_x) {
                    (Some(x), Some(got)) => got.dist_inf(x).map(|d| d <= 1e-12).unwrap_or(false),
                    (None, _) => true,
                    _ => false,
                };
                let measured = match &w.preimage_x {
                    Some(px) if w.found => format!("found, preimage {px}"),
                    _ => w.notes.join("; "),
                };
                sec.check(name.clone(), "found", measured, w.found && matches && w.is_sound(t, cone));
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthant_control(n: usize) -> Scenario {
        let mut e1 = vec![0.0; n];
        e1[0] = 1.0;
        Scenario::new(
            "orthant-control",
            ConeSpec::Orthant { n },
            LinearMap::Identity,
            Functional::covector(e1.clone()),
            Point::coords(e1),
        )
    }

    #[test]
    fn construction_errors_become_failures() {
        let mut s = orthant_control(3);
        s.u = Point::coords(vec![-1.0, 0.0, 0.0]);
        let r = run_scenario(&s, 0);
        assert!(!r.passed());
        assert!(r.sections[0].assertions[0].measured.contains("not a nonzero element"));
    }

    #[test]
    fn orthant_control_has_no_witness() {
        let mut s = orthant_control(3)
            .expect(Expectation::Positive(true))
            .expect(Expectation::InversePositive(true))
            .expect(Expectation::InverseResidualMax(1e-12))
            .expect(Expectation::UInterior(false))
            .expect(Expectation::Preimage {
                y: Point::coords(vec![1.0, 1.0, 1.0]),
                x: Point::coords(vec![0.5, 1.0, 1.0]),
                tol: 0.0,
            })
            .expect(Expectation::Witness { found: false });
        s.budget = 400;
        let r = run_scenario(&s, 3);
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn wrong_expectations_fail() {
        let s = orthant_control(2)
            .expect(Expectation::Witness { found: true })
            .expect(Expectation::Class {
                point: Point::coords(vec![1.0, -1.0]),
                class: MembershipClass::Interior,
            });
        let mut s = s;
        s.budget = 100;
        let r = run_scenario(&s, 0);
        assert_eq!(r.counts(), (1, 3));
    }

    #[test]
    fn deterministic_text() {
        let s = orthant_control(3).expect(Expectation::Positive(true));
        assert_eq!(run_scenario(&s, 9).to_text(), run_scenario(&s, 9).to_text());
    }
}
