use super::{classify, margin, ConeSpec, MembershipClass, Point, Region, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::numerics::{norm2, simplex_quadratic_min, SymMat};
use crate::rng::RngStream;

const REJECTION_TRIES: usize = 1000;

/// Gaussian point of the ambient space (symmetric gaussian matrices for the
/// matrix cones).
pub fn sample_ambient(cone: &ConeSpec, rng: &mut RngStream) -> Point {
    match cone {
        ConeSpec::Psd { n } | ConeSpec::Copositive { n } => {
            Point::matrix(SymMat::from_upper(*n, |_, _| rng.normal()))
        }
        ConeSpec::GridNonneg { grid } => Point::GridFunction {
            grid: grid.clone(),
            values: rng.normals(grid.len()),
        },
        _ => Point::coords(rng.normals(cone.ambient_dim())),
    }
}

/// Draw a point from the requested region.
///
/// Interior and boundary samples are built constructively; exterior samples
/// come from rejection sampling of ambient gaussians, with a constructive
/// fallback once the rejection budget is spent. Every returned point
/// classifies into the requested region at tolerance `1e-9`.
pub fn sample_point(cone: &ConeSpec, region: Region, rng: &mut RngStream) -> Result<Point> {
    match region {
        Region::Cone => {
            if cone.has_interior() && rng.coin() {
                interior(cone, rng)
            } else {
                boundary(cone, rng)
            }
        }
        Region::Interior => {
            if !cone.has_interior() {
                return Err(Error::EmptyRegion(format!("{cone} has empty interior")));
            }
            interior(cone, rng)
        }
        Region::Boundary => boundary(cone, rng),
        Region::Exterior => exterior(cone, rng),
    }
}

fn abs_normals(rng: &mut RngStream, n: usize, floor: f64) -> Vec<f64> {
    (0..n).map(|_| rng.normal().abs() + floor).collect()
}

fn psd_sample(rng: &mut RngStream, n: usize, rank: usize) -> SymMat {
    let g: Vec<Vec<f64>> = (0..n).map(|_| rng.normals(rank)).collect();
    SymMat::from_upper(n, |i, j| crate::numerics::dot(&g[i], &g[j]))
}

fn nonneg_sym(rng: &mut RngStream, n: usize) -> SymMat {
    SymMat::from_upper(n, |_, _| rng.normal().abs())
}

fn interior(cone: &ConeSpec, rng: &mut RngStream) -> Result<Point> {
    Ok(match cone {
        ConeSpec::Orthant { n } => Point::coords(abs_normals(rng, *n, 1e-6)),
        ConeSpec::GridNonneg { grid } => Point::GridFunction {
            grid: grid.clone(),
            values: abs_normals(rng, grid.len(), 1e-6),
        },
        ConeSpec::Lorentz { d } => {
            let mut v = rng.normals(*d);
            let alpha = norm2(&v) + rng.normal().abs() + 1e-6;
            v.push(alpha);
            Point::coords(v)
        }
        ConeSpec::Psd { n } => {
            let a = psd_sample(rng, *n, *n);
            Point::matrix(SymMat::from_upper(*n, |i, j| {
                a.get(i, j) + if i == j { 1e-3 } else { 0.0 }
            }))
        }
        ConeSpec::Copositive { n } => Point::matrix(copositive_interior(rng, *n)),
        ConeSpec::Lexicographic => Point::coords(vec![rng.normal().abs() + 1e-6, rng.normal()]),
        ConeSpec::Ray { direction } => {
            let t = rng.normal().abs() + 1e-6;
            Point::coords(direction.iter().map(|d| t * d).collect())
        }
    })
}

fn copositive_interior(rng: &mut RngStream, n: usize) -> SymMat {
    let p = psd_sample(rng, n, n);
    let q = nonneg_sym(rng, n);
    SymMat::from_upper(n, |i, j| {
        p.get(i, j) + q.get(i, j) + if i == j { 1e-3 } else { 0.0 }
    })
}

/// `A − c·J` where `J` is the all-ones matrix; on the simplex `xᵀJx = 1`,
/// so this shifts the simplex minimum by exactly `−c`.
fn shift_by_ones(a: &SymMat, c: f64) -> SymMat {
    a.map(|v| v - c)
}

fn boundary(cone: &ConeSpec, rng: &mut RngStream) -> Result<Point> {
    Ok(match cone {
        ConeSpec::Orthant { n } => {
            let v = abs_normals(rng, *n, 0.0);
            Point::coords(zero_some(rng, v))
        }
        ConeSpec::GridNonneg { grid } => {
            let v = abs_normals(rng, grid.len(), 0.0);
            Point::GridFunction {
                grid: grid.clone(),
                values: zero_some(rng, v),
            }
        }
        ConeSpec::Lorentz { d } => {
            let mut v = rng.normals(*d);
            let alpha = norm2(&v);
            v.push(alpha);
            Point::coords(v)
        }
        ConeSpec::Psd { n } => Point::matrix(psd_sample(rng, *n, n - 1)),
        ConeSpec::Copositive { n } => {
            let a = copositive_interior(rng, *n);
            let m = simplex_quadratic_min(&a)?.value;
            Point::matrix(shift_by_ones(&a, m))
        }
        ConeSpec::Lexicographic => Point::coords(vec![0.0, rng.normal().abs()]),
        ConeSpec::Ray { direction } => {
            if direction.len() == 1 {
                Point::coords(vec![0.0])
            } else {
                let t = rng.normal().abs() + 1e-6;
                Point::coords(direction.iter().map(|d| t * d).collect())
            }
        }
    })
}

/// Zero a random nonempty subset of coordinates, keeping at least one
/// nonzero when there are two or more.
fn zero_some(rng: &mut RngStream, mut v: Vec<f64>) -> Vec<f64> {
    let n = v.len();
    let k = if n == 1 { 1 } else { 1 + rng.index(n - 1) };
    for &i in rng.permutation(n).iter().take(k) {
        v[i] = 0.0;
    }
    v
}

fn exterior(cone: &ConeSpec, rng: &mut RngStream) -> Result<Point> {
    for _ in 0..REJECTION_TRIES {
        let p = sample_ambient(cone, rng);
        if classify(cone, &p, DEFAULT_TOL)?.class == MembershipClass::Exterior {
            return Ok(p);
        }
    }
    // constructive fallback: push a cone sample out along a fixed direction
    let p = boundary(cone, rng)?;
    let shift = rng.normal().abs() + 1e-3;
    let out = match cone {
        ConeSpec::Orthant { .. } | ConeSpec::GridNonneg { .. } | ConeSpec::Lexicographic => {
            let mut raw = p.raw().to_vec();
            raw[0] = -shift;
            cone.point_from_raw(raw)?
        }
        ConeSpec::Lorentz { d } => {
            let mut raw = p.raw().to_vec();
            raw[*d] -= shift;
            Point::coords(raw)
        }
        ConeSpec::Psd { n } => {
            let a = p.as_matrix().unwrap();
            Point::matrix(SymMat::from_upper(*n, |i, j| {
                a.get(i, j) - if i == j { shift } else { 0.0 }
            }))
        }
        ConeSpec::Copositive { .. } => Point::matrix(shift_by_ones(p.as_matrix().unwrap(), shift)),
        ConeSpec::Ray { direction } => Point::coords(direction.iter().map(|d| -shift * d).collect()),
    };
    debug_assert!(margin(cone, &out)? < -DEFAULT_TOL);
    Ok(out)
}
