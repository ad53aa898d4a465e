use std::time::Instant;

use super::report::{num, Report, Section};
use crate::cones::{
    classify, dual_min_on_samples, find_incomparable, is_extremal, leq, margin, sample_ambient, sample_dual,
    sample_extremal, sample_non_extremal, sample_point, separating_functional, supporting_functional, ConeSpec,
    MembershipClass, Point, Region, DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::operators::{pullback, sample_automorphism};
use crate::rng::RngStream;

const TRIALS: usize = 30;
const DUAL_SAMPLES: usize = 100;

type Group = fn(&ConeSpec, &mut RngStream, &mut Section) -> Result<()>;

const GROUPS: [(&str, Group); 8] = [
    ("archimedean", archimedean),
    ("axioms", axioms),
    ("duality", duality),
    ("extremal-preservation", extremal_preservation),
    ("homogeneity", homogeneity),
    ("incomparable", incomparable),
    ("order-unit", order_unit),
    ("pullback-positivity", pullback_positivity),
];

/// Sampled checks of the structural facts every supported cone should satisfy:
/// cone axioms, duality, extremal preservation, the order-unit battery,
/// Archimedean spot checks, margin homogeneity and positivity of pullbacks.
/// Groups that do not apply to a family are skipped with a note.
pub fn run_property_suite(cone: &ConeSpec, seed: u64) -> Report {
    Report::new(seed, property_sections(cone, seed))
}

pub(crate) fn property_sections(cone: &ConeSpec, seed: u64) -> Vec<Section> {
    if let Err(e) = cone.validate() {
        let mut sec = Section::new(format!("properties {cone}"));
        sec.check("valid cone", "ok", format!("error: {e}"), false);
        return vec![sec];
    }
    let rng = RngStream::new(seed).split_named(&cone.to_string());
    GROUPS
        .iter()
        .enumerate()
        .map(|(i, (name, group))| {
            let start = Instant::now();
            let mut sec = Section::new(format!("properties {cone} {name}"));
            if let Err(e) = group(cone, &mut rng.split(i as u64), &mut sec) {
                sec.check("completed", "ok", format!("error: {e}"), false);
            }
            sec.runtime = start.elapsed();
            sec
        })
        .collect()
}

fn in_cone(cone: &ConeSpec, p: &Point) -> Result<bool> {
    Ok(classify(cone, p, DEFAULT_TOL)?.in_cone())
}

fn class(cone: &ConeSpec, p: &Point) -> Result<MembershipClass> {
    Ok(classify(cone, p, DEFAULT_TOL)?.class)
}

fn axioms(cone: &ConeSpec, rng: &mut RngStream, sec: &mut Section) -> Result<()> {
    let (mut sums, mut scalings, mut pointed) = (0, 0, 0);
    for _ in 0..TRIALS {
        let p = sample_point(cone, Region::Cone, rng)?;
        let q = sample_point(cone, Region::Cone, rng)?;
        sums += in_cone(cone, &p.add(&q)?)? as usize;
        let mut all = true;
        for c in [0.0, 0.5, 3.0] {
            all &= in_cone(cone, &p.scale(c))?;
        }
        scalings += all as usize;
        pointed += (p.norm() <= 1e-6 || !in_cone(cone, &p.neg())?) as usize;
    }
    sec.check_eq("closed under addition", TRIALS, sums);
    sec.check_eq("closed under nonnegative scaling", TRIALS, scalings);
    sec.check_eq("pointed: p and -p both in K only for p = 0", TRIALS, pointed);
    Ok(())
}

fn duality(cone: &ConeSpec, rng: &mut RngStream, sec: &mut Section) -> Result<()> {
    if !cone.is_closed() {
        sec.note("skipped: the cone is not closed, so dual functionals do not decide membership");
        return Ok(());
    }
    let mut worst = f64::INFINITY;
    for _ in 0..TRIALS {
        let f = sample_dual(cone, rng);
        worst = worst.min(dual_min_on_samples(cone, &f, rng, DUAL_SAMPLES)?);
    }
    sec.check_ge("sampled dual functionals are nonnegative on K", worst, -1e-9);

    let (mut separated, mut sep_dual) = (f64::NEG_INFINITY, f64::INFINITY);
    for _ in 0..TRIALS {
        let p = sample_point(cone, Region::Exterior, rng)?;
        let s = separating_functional(cone, &p)?;
        separated = separated.max(s.value / (1.0 + p.norm_inf()));
        sep_dual = sep_dual.min(dual_min_on_samples(cone, &s.functional, rng, DUAL_SAMPLES)?);
    }
    sec.check_lt("separating functionals are negative on exterior points", separated, 0.0);
    sec.check_ge("separating functionals lie in the dual cone", sep_dual, -1e-9);
    Ok(())
}

fn extremal_preservation(cone: &ConeSpec, rng: &mut RngStream, sec: &mut Section) -> Result<()> {
    if let ConeSpec::Copositive { .. } = cone {
        sec.note("skipped: no extremality test for copositive matrices");
        return Ok(());
    }
    let (mut sampled, mut preserved) = (0, 0);
    for _ in 0..TRIALS {
        let v = sample_extremal(cone, rng)?;
        let a = sample_automorphism(cone, rng);
        sampled += is_extremal(cone, &v, DEFAULT_TOL)? as usize;
        preserved += is_extremal(cone, &a.apply(&v)?, DEFAULT_TOL)? as usize;
    }
    sec.check_eq("sampled extremals are extremal", TRIALS, sampled);
    sec.check_eq("automorphisms map extremals to extremals", TRIALS, preserved);

    let (mut non, mut kept) = (0, 0);
    for _ in 0..TRIALS {
        let p = match sample_non_extremal(cone, rng) {
            Ok(p) => p,
            Err(Error::EmptyRegion(why)) => {
                sec.note(format!("no non-extremal elements: {why}"));
                return Ok(());
            }
            Err(e) => return Err(e),
        };
        let a = sample_automorphism(cone, rng);
        non += !is_extremal(cone, &p, DEFAULT_TOL)? as usize;
        kept += !is_extremal(cone, &a.apply(&p)?, DEFAULT_TOL)? as usize;
    }
    sec.check_eq("sampled non-extremals are not extremal", TRIALS, non);
    sec.check_eq("automorphisms map non-extremals to non-extremals", TRIALS, kept);
    Ok(())
}

/// Smallest power of two `λ ≤ 2^20` with `x ≤ λu`.
fn domination_factor(cone: &ConeSpec, x: &Point, u: &Point) -> Result<Option<f64>> {
    let mut lambda = 1.0;
    while lambda <= 1.048_576e6 {
        if leq(cone, x, &u.scale(lambda), DEFAULT_TOL)? {
            return Ok(Some(lambda));
        }
        lambda *= 2.0;
    }
    Ok(None)
}

fn order_unit(cone: &ConeSpec, rng: &mut RngStream, sec: &mut Section) -> Result<()> {
    match cone {
        ConeSpec::Lexicographic => {
            sec.note("skipped: interior membership is decided by exact sign rules");
            return Ok(());
        }
        _ if !cone.has_interior() => {
            sec.note("skipped: the cone has empty interior, so it has no order units");
            return Ok(());
        }
        _ => {}
    }
    let unit = cone.order_unit().expect("cones with interior have an order unit");

    // (i) interior points dominate every point; boundary points are not order units.
    let u = sample_point(cone, Region::Interior, rng)?;
    let (mut dominated, mut worst) = (0, 0.0f64);
    for _ in 0..100 {
        let x = sample_ambient(cone, rng);
        if let Some(l) = domination_factor(cone, &x, &u)? {
            dominated += 1;
            worst = worst.max(l);
        }
    }
    sec.check_eq("interior u dominates 100 sampled x with some lambda <= 2^20", 100, dominated);
    sec.note(format!("largest lambda needed: {}", num(worst)));
    let mut refuted = 0;
    for _ in 0..TRIALS {
        let p = sample_point(cone, Region::Boundary, rng)?;
        let (g, _) = supporting_functional(cone, &p)?;
        let (gp, gu) = (g.eval(&p)?, g.eval(&unit)?);
        // g(λp − unit) < 0 for every λ, so unit is never below λp.
        refuted += (gp.abs() <= 1e-9 * (1.0 + p.norm_inf()) && gu > 0.0 && !leq(cone, &unit, &p.scale(1e6), DEFAULT_TOL)?)
            as usize;
    }
    sec.check_eq("boundary points are not order units", TRIALS, refuted);

    // (ii) nonzero dual functionals are positive at interior points.
    let mut min_ratio = f64::INFINITY;
    for _ in 0..TRIALS {
        let f = sample_dual(cone, rng);
        let u = sample_point(cone, Region::Interior, rng)?;
        min_ratio = min_ratio.min(f.eval(&u)?);
    }
    sec.check_gt("f(u) > 0 for sampled f in K' and interior u", min_ratio, 0.0);

    // (iii) u interior and u <= v imply v interior.
    let mut promoted = 0;
    for _ in 0..TRIALS {
        let u = sample_point(cone, Region::Interior, rng)?;
        let k = sample_point(cone, Region::Cone, rng)?;
        promoted += (class(cone, &u.add(&k)?)? == MembershipClass::Interior) as usize;
    }
    sec.check_eq("v >= u interior is interior", TRIALS, promoted);

    // (iv) positive multiples of interior points are interior.
    let mut scaled = 0;
    for _ in 0..TRIALS {
        let u = sample_point(cone, Region::Interior, rng)?;
        let mut all = true;
        for alpha in [0.5, 2.0, 10.0] {
            all &= class(cone, &u.scale(alpha))? == MembershipClass::Interior;
        }
        scaled += all as usize;
    }
    sec.check_eq("alpha*u interior for alpha in {0.5, 2, 10}", TRIALS, scaled);

    // (v) automorphisms preserve the interior and the boundary.
    let mut same = 0;
    for _ in 0..TRIALS {
        let a = sample_automorphism(cone, rng);
        let mut ok = true;
        for region in [Region::Interior, Region::Boundary] {
            let p = sample_point(cone, region, rng)?;
            ok &= class(cone, &p)? == class(cone, &a.apply(&p)?)?;
        }
        same += ok as usize;
    }
    sec.check_eq("automorphisms preserve interior and boundary classes", TRIALS, same);
    Ok(())
}

fn archimedean(cone: &ConeSpec, rng: &mut RngStream, sec: &mut Section) -> Result<()> {
    if let ConeSpec::Lexicographic = cone {
        let (x, y) = (Point::coords(vec![0.0, 1.0]), Point::coords(vec![1.0, 0.0]));
        let mut all = true;
        let mut n = 1.0;
        while n <= 1.048_576e6 {
            all &= leq(cone, &x.scale(n), &y, 0.0)?;
            n *= 2.0;
        }
        sec.check_true("n(0,1) <= (1,0) for n up to 2^20", all);
        sec.check_true("(0,1) is not <= 0", !leq(cone, &x, &cone.zero(), 0.0)?);
        sec.note("the lexicographic cone is not Archimedean; the checks confirm the failure");
        return Ok(());
    }
    let (mut broken, mut tried) = (0, 0);
    for _ in 0..TRIALS {
        let y = sample_point(cone, Region::Cone, rng)?;
        let mut x = sample_ambient(cone, rng);
        for _ in 0..100 {
            if !in_cone(cone, &x.neg())? {
                break;
            }
            x = sample_ambient(cone, rng);
        }
        if in_cone(cone, &x.neg())? {
            continue;
        }
        tried += 1;
        let mut n = 1.0;
        while n <= 1.073_741_824e9 {
            if !leq(cone, &x.scale(n), &y, DEFAULT_TOL)? {
                broken += 1;
                break;
            }
            n *= 2.0;
        }
    }
    sec.check_eq("x not <= 0 gives some n <= 2^30 with nx not <= y", tried, broken);
    let mut bounded = 0;
    for _ in 0..TRIALS {
        let y = sample_point(cone, Region::Cone, rng)?;
        let x = sample_point(cone, Region::Cone, rng)?.neg();
        let mut all = true;
        let mut n = 1.0;
        while n <= 1.048_576e6 {
            all &= leq(cone, &x.scale(n), &y, DEFAULT_TOL)?;
            n *= 2.0;
        }
        bounded += all as usize;
    }
    sec.check_eq("x <= 0 gives nx <= y for all n up to 2^20", TRIALS, bounded);
    Ok(())
}

fn homogeneity(cone: &ConeSpec, rng: &mut RngStream, sec: &mut Section) -> Result<()> {
    if let ConeSpec::Lexicographic = cone {
        let mut same = 0;
        for _ in 0..TRIALS {
            let p = sample_ambient(cone, rng);
            let mut ok = true;
            for c in [0.5, 3.0, 1e3] {
                ok &= class(cone, &p.scale(c))? == class(cone, &p)?;
            }
            same += ok as usize;
        }
        sec.check_eq("membership class invariant under positive scaling", TRIALS, same);
        sec.note("the lexicographic margin is a sign indicator, so only its class is checked");
        return Ok(());
    }
    let mut worst = 0.0f64;
    for _ in 0..TRIALS {
        let p = sample_ambient(cone, rng);
        let m = margin(cone, &p)?;
        for c in [0.5, 3.0, 1e3] {
            let dev = (margin(cone, &p.scale(c))? - c * m).abs() / (c * (1.0 + p.norm_inf()));
            worst = worst.max(dev);
        }
    }
    sec.check_le("relative deviation of margin(cp) from c*margin(p)", worst, 1e-9);
    Ok(())
}

fn pullback_positivity(cone: &ConeSpec, rng: &mut RngStream, sec: &mut Section) -> Result<()> {
    let (mut worst, mut mismatch) = (f64::INFINITY, 0.0f64);
    for _ in 0..TRIALS {
        let f = sample_dual(cone, rng);
        let a = sample_automorphism(cone, rng);
        let g = pullback(&f, &a);
        worst = worst.min(dual_min_on_samples(cone, &g, rng, DUAL_SAMPLES)?);
        let x = sample_ambient(cone, rng);
        let direct = f.eval(&a.apply(&x)?)?;
        mismatch = mismatch.max((g.eval(&x)? - direct).abs() / (1.0 + direct.abs()));
    }
    sec.check_ge("f o A is nonnegative on K for f in K' and automorphic A", worst, -1e-9);
    sec.check_le("pullback agrees with f(A x)", mismatch, 1e-9);
    Ok(())
}

fn incomparable(cone: &ConeSpec, rng: &mut RngStream, sec: &mut Section) -> Result<()> {
    if cone.ambient_dim() < 2 {
        sec.note("skipped: ambient dimension below two");
        return Ok(());
    }
    match find_incomparable(cone, rng, 1000) {
        Ok(x) => {
            let (a, b) = (in_cone(cone, &x)?, in_cone(cone, &x.neg())?);
            sec.check_true("found x with neither x >= 0 nor x <= 0", !a && !b);
        }
        Err(Error::TotalOrder) => {
            let total = matches!(cone, ConeSpec::Lexicographic);
            sec.check("no incomparable element", "total order", "total order", total);
        }
        Err(e) => return Err(e),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthant_and_psd_pass() {
        for cone in [ConeSpec::Orthant { n: 4 }, ConeSpec::Psd { n: 3 }] {
            let r = run_property_suite(&cone, 7);
            assert!(r.passed(), "{}", r.to_text());
            assert_eq!(r.sections.len(), GROUPS.len());
        }
    }

    #[test]
    fn lexicographic_skips_and_passes() {
        let r = run_property_suite(&ConeSpec::Lexicographic, 0);
        assert!(r.passed(), "{}", r.to_text());
        let duality = r.section("properties lex duality").unwrap();
        assert!(duality.assertions.is_empty() && !duality.notes.is_empty());
        let order = r.section("properties lex order-unit").unwrap();
        assert!(order.assertions.is_empty());
        assert!(!r.section("properties lex extremal-preservation").unwrap().assertions.is_empty());
    }

    #[test]
    fn invalid_cone_is_reported() {
        let r = run_property_suite(&ConeSpec::Orthant { n: 0 }, 0);
        assert!(!r.passed());
    }
}
