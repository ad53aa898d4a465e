use serde::Serialize;

use super::{
    boundary_crossing, check_witness, found_report, Strategy, StrategyAttempts, WitnessReport, BISECTION_TOL,
};
use crate::cones::{
    classify, is_extremal, margin, sample_extremal, sample_point, ConeSpec, MembershipClass, Point, Region, DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::operators::{scaled_family, Functional, LinearMap};
use crate::rng::RngStream;

/// Halvings of the step along `−e` in the boundary-functional strategy.
const MAX_HALVINGS: usize = 60;

/// Visit boundary points `x₀` with `f(x₀)` clearly positive: deterministic
/// candidates first, then crossings of random interior-to-exterior segments.
/// Stops when `visit` returns `Some`. Returns the visitor's result and the
/// number of candidates drawn.
fn search_boundary<T>(
    cone: &ConeSpec,
    f: &Functional,
    rng: &mut RngStream,
    budget: usize,
    mut visit: impl FnMut(&Point) -> Result<Option<T>>,
) -> Result<(Option<T>, usize)> {
    let Some(e) = cone.order_unit() else {
        return Ok((None, 0));
    };
    let threshold = 1e-6 * f.eval(&e)?.abs();
    let mut attempts = 0;
    let mut fast = Vec::new();
    if let (ConeSpec::Lorentz { d }, Functional::SpinDual { xhat, .. }) = (cone, f) {
        let norm = crate::numerics::norm2(xhat);
        if xhat.len() == *d && norm > 0.0 {
            let mut p: Vec<f64> = xhat.iter().map(|v| v / norm).collect();
            p.push(1.0);
            fast.push(Point::coords(p));
        }
    }
    fast.extend(cone.canonical_generators());
    for x0 in fast {
        if attempts >= budget {
            return Ok((None, attempts));
        }
        attempts += 1;
        if classify(cone, &x0, DEFAULT_TOL)?.class == MembershipClass::Boundary && f.eval(&x0)? > threshold {
            if let Some(out) = visit(&x0)? {
                return Ok((Some(out), attempts));
            }
        }
    }
    if !cone.is_closed() {
        return Ok((None, attempts));
    }
    while attempts < budget {
        attempts += 1;
        let u = sample_point(cone, Region::Interior, rng)?;
        let v = sample_point(cone, Region::Exterior, rng)?;
        let crossing = boundary_crossing(cone, &u, &v, BISECTION_TOL)?;
        if crossing.verdict_at_c.class == MembershipClass::Boundary && f.eval(&crossing.point)? > threshold {
            if let Some(out) = visit(&crossing.point)? {
                return Ok((Some(out), attempts));
            }
        }
    }
    Ok((None, attempts))
}

/// A boundary point `x₀` with `f(x₀) > 1e-6·f(e)`, `e` the order unit.
///
/// Cones with empty interior exhaust immediately with zero attempts.
pub fn boundary_functional_witness(cone: &ConeSpec, f: &Functional, rng: &mut RngStream, budget: usize) -> Result<Point> {
    let (found, attempts) = search_boundary(cone, f, rng, budget, |x| Ok(Some(x.clone())))?;
    found.ok_or(Error::BudgetExhausted { attempts })
}

/// Whether `T` maps the boundary point `x` into the interior, which rules out
/// `T` being an automorphism. Requires `T = S + f(·)u` with `u` interior.
pub fn interior_promotion_check(t: &LinearMap, cone: &ConeSpec, x: &Point) -> Result<bool> {
    let LinearMap::RankOnePerturbed { u, .. } = t else {
        return Err(Error::precondition("T is not a rank-one perturbation"));
    };
    if classify(cone, u, DEFAULT_TOL)?.class != MembershipClass::Interior {
        return Err(Error::precondition("u is not an interior point"));
    }
    if classify(cone, x, DEFAULT_TOL)?.class != MembershipClass::Boundary {
        return Err(Error::precondition("x is not a boundary point"));
    }
    Ok(classify(cone, &t.apply(x)?, DEFAULT_TOL)?.class == MembershipClass::Interior)
}

/// Outcome of [`extremal_witness`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalWitness {
    /// The extremal element used; the witness image is `S(v)`.
    pub v: Point,
    /// Whether `T(v)` tested as extremal; `false` is the expected outcome.
    pub image_extremal: bool,
    /// Relative distance of `u` from the ray `ℝ₊S(v)`.
    pub ray_residual: f64,
    pub report: WitnessReport,
}

/// Relative distance of `u` from the ray through `w`.
fn ray_residual(u: &Point, w: &Point) -> Result<f64> {
    let ww = w.inner(w)?;
    let t = if ww > 0.0 { (u.inner(w)? / ww).max(0.0) } else { 0.0 };
    Ok(u.axpy(-t, w)?.norm() / u.norm().max(f64::MIN_POSITIVE))
}

/// For an extremal `v` with `f(v) > 0` and `u ∉ ℝ₊S(v)`, the image `y = S(v)`
/// is in `K` while `T⁻¹y = v − λS⁻¹u` is not.
pub fn extremal_witness(
    cone: &ConeSpec,
    s: &LinearMap,
    f: &Functional,
    u: &Point,
    rng: &mut RngStream,
    budget: usize,
) -> Result<ExtremalWitness> {
    if let ConeSpec::Copositive { .. } = cone {
        return Err(Error::unsupported("no extremality test for copositive matrices"));
    }
    if cone.ambient_dim() < 2 {
        return Err(Error::precondition("the cone must span at least two dimensions"));
    }
    let t = LinearMap::rank_one(s.clone(), f.clone(), u.clone());
    let mut candidates = Vec::new();
    if let (ConeSpec::Lorentz { d }, Functional::SpinDual { xhat, .. }) = (cone, f) {
        let norm = crate::numerics::norm2(xhat);
        if xhat.len() == *d && norm > 0.0 {
            let mut p: Vec<f64> = xhat.iter().map(|v| v / norm).collect();
            p.push(1.0);
            candidates.push(Point::coords(p));
        }
    }
    candidates.extend(cone.canonical_generators());
    let mut attempts = 0;
    let mut any_pairing = false;
    while attempts < budget {
        let v = if attempts < candidates.len() {
            candidates[attempts].clone()
        } else {
            sample_extremal(cone, rng)?
        };
        attempts += 1;
        if !is_extremal(cone, &v, DEFAULT_TOL)? || f.eval(&v)? <= 1e-9 {
            continue;
        }
        any_pairing = true;
        let y = s.apply(&v)?;
        let residual = ray_residual(u, &y)?;
        if residual <= 1e-6 {
            continue;
        }
        let x = t.apply_inverse(&y)?;
        if let Some(verified) = check_witness(&t, cone, &y, &x)? {
            let mut counts = StrategyAttempts::default();
            counts.add(Strategy::Extremal, attempts);
            let image_extremal = is_extremal(cone, &t.apply(&v)?, DEFAULT_TOL)?;
            return Ok(ExtremalWitness {
                v,
                image_extremal,
                ray_residual: residual,
                report: found_report(Strategy::Extremal, y, x, verified, counts, Vec::new()),
            });
        }
        if attempts >= candidates.len() && !any_pairing && attempts >= 64 {
            break;
        }
    }
    if !any_pairing {
        return Err(Error::NoExtremalWithPositivePairing);
    }
    Err(Error::BudgetExhausted { attempts })
}

/// Test the single candidate image `y`.
pub fn witness_from_image(t: &LinearMap, cone: &ConeSpec, y: &Point) -> Result<WitnessReport> {
    let x = t.apply_inverse(y)?;
    let mut counts = StrategyAttempts::default();
    counts.add(Strategy::Direct, 1);
    Ok(match check_witness(t, cone, y, &x)? {
        Some(v) => found_report(Strategy::Direct, y.clone(), x, v, counts, Vec::new()),
        None => WitnessReport::not_found(
            counts,
            vec![format!(
                "candidate rejected: y margin {}, x margin {}",
                margin(cone, y)?,
                margin(cone, &x)?
            )],
        ),
    })
}

/// Search for `y ∈ K` with `T⁻¹y ∉ K`.
///
/// Strategies run cheapest first and share `budget` in four parts:
/// random cone elements (`Direct`); points `x₀ − s·e` just outside a boundary
/// point with `f(x₀) > 0`, whose images stay in `K` for small `s`
/// (`BoundaryFunctional`); images of extremals (`Extremal`); and images of
/// canonical generators when `f(S⁻¹u) = 0` (`Scaling`). The first verified
/// witness wins.
pub fn nonpositive_inverse_witness(
    t: &LinearMap,
    cone: &ConeSpec,
    rng: &mut RngStream,
    budget: usize,
) -> Result<WitnessReport> {
    if !t.has_closed_form_inverse() {
        return Err(Error::unsupported("witness search needs a closed-form inverse"));
    }
    let share = budget / 4;
    let shares = [budget - 3 * share, share, share, share];
    let mut counts = StrategyAttempts::default();
    let mut notes = Vec::new();

    // Direct.
    let mut direct_rng = rng.split(1);
    for _ in 0..shares[0] {
        counts.add(Strategy::Direct, 1);
        let y = sample_point(cone, Region::Cone, &mut direct_rng)?;
        let x = t.apply_inverse(&y)?;
        if let Some(v) = check_witness(t, cone, &y, &x)? {
            return Ok(found_report(Strategy::Direct, y, x, v, counts, notes));
        }
    }
    notes.push(format!("direct: no witness in {} samples", shares[0]));

    let LinearMap::RankOnePerturbed { s, f, u } = t else {
        notes.push("remaining strategies need a rank-one perturbation".into());
        return Ok(WitnessReport::not_found(counts, notes));
    };

    // BoundaryFunctional.
    if cone.has_interior() {
        let (hit, used) = boundary_functional_strategy(t, f, cone, &mut rng.split(2), shares[1])?;
        counts.add(Strategy::BoundaryFunctional, used);
        if let Some((y, x, v)) = hit {
            return Ok(found_report(Strategy::BoundaryFunctional, y, x, v, counts, notes));
        }
        notes.push(format!("boundary_functional: no witness from {used} boundary candidates"));
    } else {
        notes.push("boundary_functional: cone has empty interior".into());
    }

    // Extremal.
    let mut ex_rng = rng.split(3);
    match extremal_witness(cone, s, f, u, &mut ex_rng, shares[2]) {
        Ok(w) => {
            counts.add(Strategy::Extremal, w.report.attempts);
            let (Some(y), Some(x)) = (w.report.witness_y, w.report.preimage_x) else {
                unreachable!("found extremal witnesses carry both points")
            };
            let v = check_witness(t, cone, &y, &x)?.expect("verified by extremal_witness");
            return Ok(found_report(Strategy::Extremal, y, x, v, counts, notes));
        }
        Err(Error::BudgetExhausted { attempts }) => {
            counts.add(Strategy::Extremal, attempts);
            notes.push(format!("extremal: no witness in {attempts} attempts"));
        }
        Err(err) => notes.push(format!("extremal: {err}")),
    }

    // Scaling.
    let b = s.apply_inverse(u)?;
    let fb = f.eval(&b)?;
    if fb.abs() <= 1e-9 {
        for z in cone.canonical_generators().into_iter().take(shares[3]) {
            counts.add(Strategy::Scaling, 1);
            let y = s.apply(&z)?;
            let x = t.apply_inverse(&y)?;
            if let Some(v) = check_witness(t, cone, &y, &x)? {
                return Ok(found_report(Strategy::Scaling, y, x, v, counts, notes));
            }
        }
        notes.push("scaling: no canonical generator gives a witness".into());
    } else {
        notes.push(format!("scaling: f(S⁻¹u) = {fb} is not zero"));
    }
    Ok(WitnessReport::not_found(counts, notes))
}

type Hit = (Point, Point, super::Verified);

/// For boundary points `x₀` with `f(x₀) > 0`, the points `x₀ − s·e` (`e` the
/// order unit) are exterior for every `s > 0`, while their images approach
/// `T(x₀)`, which is interior when `u` is. Halve `s` until the image is in `K`.
fn boundary_functional_strategy(
    t: &LinearMap,
    f: &Functional,
    cone: &ConeSpec,
    rng: &mut RngStream,
    budget: usize,
) -> Result<(Option<Hit>, usize)> {
    let Some(e) = cone.order_unit() else {
        return Ok((None, 0));
    };
    search_boundary(cone, f, rng, budget, |x0| {
        let mut step = 1.0;
        for _ in 0..MAX_HALVINGS {
            let x = x0.axpy(-step, &e)?;
            let y = t.apply(&x)?;
            if let Some(v) = check_witness(t, cone, &y, &x)? {
                return Ok(Some((y, x, v)));
            }
            if margin(cone, &y)? >= super::Y_MARGIN_MIN {
                // Smaller steps only bring x closer to the cone.
                break;
            }
            step *= 0.5;
        }
        Ok(None)
    })
}

/// Smallest `n ≤ n_max` for which `Tₙ = S + n(f∘S)u` has a witness at a fixed
/// image `y`: the first canonical generator with `f(y) > 0`, else the order
/// unit, else a sampled cone element. Requires `f(u) = 0`.
pub fn smallest_scaling_n(
    s: &LinearMap,
    f: &Functional,
    u: &Point,
    cone: &ConeSpec,
    rng: &mut RngStream,
    n_max: u64,
) -> Result<(u64, WitnessReport)> {
    cone.check_point(u)?;
    let fu = f.eval(u)?;
    if fu.abs() > 1e-9 {
        return Err(Error::precondition(format!("f(u) = {fu} is not zero")));
    }
    let mut y = None;
    for p in cone.canonical_generators().into_iter().chain(cone.order_unit()) {
        if f.eval(&p)? > 1e-9 {
            y = Some(p);
            break;
        }
    }
    if y.is_none() {
        for _ in 0..1000 {
            let p = sample_point(cone, Region::Cone, rng)?;
            if f.eval(&p)? > 1e-9 {
                y = Some(p);
                break;
            }
        }
    }
    let y = y.ok_or_else(|| Error::precondition("f vanishes on every candidate image"))?;
    for n in 1..=n_max {
        let t = scaled_family(s, f, u, n);
        let x = t.apply_inverse(&y)?;
        if let Some(v) = check_witness(&t, cone, &y, &x)? {
            let mut counts = StrategyAttempts::default();
            counts.add(Strategy::Scaling, n as usize);
            let mut report = found_report(Strategy::Scaling, y, x, v, counts, Vec::new());
            report.scaling_n = Some(n);
            return Ok((n, report));
        }
    }
    Err(Error::NotFoundWithinRange { n_max: n_max as usize })
}
