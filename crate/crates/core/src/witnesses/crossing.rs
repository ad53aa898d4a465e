use serde::Serialize;

use crate::cones::{classify, margin, ConeSpec, MembershipClass, MembershipVerdict, Point, DEFAULT_TOL};
use crate::error::{Error, Result};

/// Default bisection tolerance on the segment parameter.
pub const BISECTION_TOL: f64 = 1e-10;
pub const BISECTION_MAX_ITER: usize = 200;

/// Where the segment `g(t) = (1 − t)u + tv` leaves the cone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingResult {
    pub c: f64,
    pub point: Point,
    pub verdict_at_c: MembershipVerdict,
    /// Band used for `verdict_at_c`: `tol·(1 + ‖v − u‖₁)`. Every margin is
    /// 1-Lipschitz in the `ℓ¹` norm of the stored entries, so the margin at
    /// `c` lies in this band.
    pub verdict_tol: f64,
    pub iterations: usize,
}

/// Bisection for the boundary crossing of the segment from an interior `u`
/// to an exterior `v`. Keeps `margin(g(lo)) > 0 ≥ margin(g(hi))`.
pub fn boundary_crossing(cone: &ConeSpec, u: &Point, v: &Point, tol: f64) -> Result<CrossingResult> {
    if !cone.is_closed() {
        return Err(Error::unsupported("bisection needs a closed cone"));
    }
    if !(tol > 0.0) {
        return Err(Error::BadEndpoints("tolerance must be positive".into()));
    }
    if classify(cone, u, DEFAULT_TOL)?.class != MembershipClass::Interior {
        return Err(Error::BadEndpoints("u is not interior".into()));
    }
    if classify(cone, v, DEFAULT_TOL)?.class != MembershipClass::Exterior {
        return Err(Error::BadEndpoints("v is not exterior".into()));
    }
    let dir = v.sub(u)?;
    let g = |t: f64| u.axpy(t, &dir);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut iterations = 0;
    while hi - lo > tol && iterations < BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if margin(cone, &g(mid)?)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let c = 0.5 * (lo + hi);
    let point = g(c)?;
    let verdict_tol = tol * (1.0 + dir.norm_l1());
    let verdict_at_c = classify(cone, &point, verdict_tol)?;
    Ok(CrossingResult {
        c,
        point,
        verdict_at_c,
        verdict_tol,
        iterations,
    })
}
