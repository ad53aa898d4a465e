use super::dual::orthogonal_unit;
use super::{classify, sample_ambient, ConeSpec, MembershipClass, Point, Region};
use crate::error::{Error, Result};
use crate::numerics::{sym_eig, SymMat};
use crate::rng::RngStream;

/// Whether the cone member `p` spans an extremal ray.
///
/// For grid cones this is a statement about the discretised cone, whose
/// extremals are the nodal hat functions.
pub fn is_extremal(cone: &ConeSpec, p: &Point, tol: f64) -> Result<bool> {
    let verdict = classify(cone, p, tol)?;
    if verdict.class == MembershipClass::Exterior {
        return Err(Error::precondition("extremality is only defined for cone members"));
    }
    Ok(match (cone, p) {
        (ConeSpec::Orthant { .. }, Point::Coordinates { values })
        | (ConeSpec::GridNonneg { .. }, Point::GridFunction { values, .. }) => {
            values.iter().filter(|&&v| v > tol).count() == 1
        }
        (ConeSpec::Lorentz { d }, Point::Coordinates { values }) => {
            let alpha = values[*d];
            alpha > tol && verdict.margin.abs() <= tol * alpha.max(1.0)
        }
        (ConeSpec::Psd { .. }, Point::Matrix { matrix }) => {
            let s = sym_eig(matrix)?;
            let n = s.values.len();
            let top = s.values[n - 1];
            top > tol && (n == 1 || s.values[n - 2] <= tol * top)
        }
        (ConeSpec::Copositive { .. }, _) => {
            return Err(Error::unsupported("no tractable extremality test for copositive matrices"))
        }
        (ConeSpec::Lexicographic, Point::Coordinates { values }) => values[0] == 0.0 && values[1] >= 0.0,
        (ConeSpec::Ray { .. }, _) => verdict.margin > tol,
        _ => unreachable!("shape checked by classify"),
    })
}

/// A random extremal element.
pub fn sample_extremal(cone: &ConeSpec, rng: &mut RngStream) -> Result<Point> {
    let scale = rng.normal().abs() + 0.1;
    Ok(match cone {
        ConeSpec::Orthant { n } => Point::unit(*n, rng.index(*n)).scale(scale),
        ConeSpec::GridNonneg { grid } => {
            let mut v = vec![0.0; grid.len()];
            v[rng.index(grid.len())] = scale;
            Point::GridFunction {
                grid: grid.clone(),
                values: v,
            }
        }
        ConeSpec::Lorentz { d } => {
            let mut x = unit_direction(rng, *d);
            for v in &mut x {
                *v *= scale;
            }
            x.push(crate::numerics::norm2(&x));
            Point::coords(x)
        }
        ConeSpec::Psd { n } => Point::matrix(SymMat::outer(&rng.normals(*n)).scale(scale)),
        ConeSpec::Lexicographic => Point::coords(vec![0.0, scale]),
        ConeSpec::Ray { direction } => Point::coords(direction.clone()).scale(scale),
        ConeSpec::Copositive { .. } => {
            return Err(Error::unsupported("copositive extremals are not sampled"))
        }
    })
}

/// A random nonzero cone element that is clearly not extremal.
pub fn sample_non_extremal(cone: &ConeSpec, rng: &mut RngStream) -> Result<Point> {
    let empty = || Err(Error::EmptyRegion(format!("every nonzero element of {cone} is extremal")));
    match cone {
        ConeSpec::Orthant { n: 1 } | ConeSpec::Psd { n: 1 } | ConeSpec::Ray { .. } => empty(),
        ConeSpec::Orthant { n } => {
            let mut v: Vec<f64> = (0..*n).map(|_| if rng.coin() { rng.normal().abs() } else { 0.0 }).collect();
            let perm = rng.permutation(*n);
            v[perm[0]] = rng.normal().abs() + 0.1;
            v[perm[1]] = rng.normal().abs() + 0.1;
            Ok(Point::coords(v))
        }
        ConeSpec::GridNonneg { grid } => {
            let n = grid.len();
            let mut v: Vec<f64> = (0..n).map(|_| if rng.coin() { rng.normal().abs() } else { 0.0 }).collect();
            let perm = rng.permutation(n);
            v[perm[0]] = rng.normal().abs() + 0.1;
            v[perm[1]] = rng.normal().abs() + 0.1;
            Ok(Point::GridFunction {
                grid: grid.clone(),
                values: v,
            })
        }
        ConeSpec::Lorentz { .. } | ConeSpec::Lexicographic | ConeSpec::Psd { .. } => {
            super::sample_point(cone, Region::Interior, rng)
        }
        ConeSpec::Copositive { .. } => super::sample_point(cone, Region::Interior, rng),
    }
}

fn unit_direction(rng: &mut RngStream, d: usize) -> Vec<f64> {
    loop {
        let g = rng.normals(d);
        let norm = crate::numerics::norm2(&g);
        if norm > 1e-6 {
            return g.iter().map(|v| v / norm).collect();
        }
    }
}

/// A point `p` with neither `p ≥ 0` nor `p ≤ 0`.
///
/// A deterministic candidate is tried first, then up to `budget` ambient
/// gaussian draws.
pub fn find_incomparable(cone: &ConeSpec, rng: &mut RngStream, budget: usize) -> Result<Point> {
    if cone.ambient_dim() < 2 {
        return Err(Error::precondition("incomparable elements need ambient dimension at least 2"));
    }
    if let ConeSpec::Lexicographic = cone {
        return Err(Error::TotalOrder);
    }
    let incomparable = |p: &Point| -> Result<bool> {
        Ok(classify(cone, p, super::DEFAULT_TOL)?.class == MembershipClass::Exterior
            && classify(cone, &p.neg(), super::DEFAULT_TOL)?.class == MembershipClass::Exterior)
    };
    let candidate = match cone {
        ConeSpec::Orthant { n } => {
            let mut v = vec![0.0; *n];
            v[0] = 1.0;
            v[1] = -1.0;
            Point::coords(v)
        }
        ConeSpec::Lorentz { d } => Point::unit(d + 1, 0),
        ConeSpec::Psd { n } | ConeSpec::Copositive { n } => {
            let mut v = vec![0.0; *n];
            v[0] = 1.0;
            if *n > 1 {
                v[1] = -1.0;
            }
            Point::matrix(SymMat::diag(&v))
        }
        ConeSpec::GridNonneg { grid } => {
            let mut v = vec![0.0; grid.len()];
            v[0] = 1.0;
            v[1] = -1.0;
            Point::GridFunction {
                grid: grid.clone(),
                values: v,
            }
        }
        ConeSpec::Ray { direction } => Point::coords(orthogonal_unit(direction)),
        ConeSpec::Lexicographic => unreachable!(),
    };
    if incomparable(&candidate)? {
        return Ok(candidate);
    }
    for _ in 0..budget {
        let p = sample_ambient(cone, rng);
        if incomparable(&p)? {
            return Ok(p);
        }
    }
    Err(Error::BudgetExhausted { attempts: budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::Grid;

    #[test]
    fn extremal_examples() {
        let o = ConeSpec::Orthant { n: 3 };
        assert!(is_extremal(&o, &Point::unit(3, 1), 1e-9).unwrap());
        assert!(!is_extremal(&o, &Point::coords(vec![1.0, 1.0, 0.0]), 1e-9).unwrap());
        let lex = ConeSpec::Lexicographic;
        assert!(is_extremal(&lex, &Point::coords(vec![0.0, 1.0]), 1e-9).unwrap());
        assert!(!is_extremal(&lex, &Point::coords(vec![1.0, 0.0]), 1e-9).unwrap());
        assert!(matches!(
            is_extremal(&ConeSpec::Copositive { n: 2 }, &Point::matrix(SymMat::identity(2)), 1e-9),
            Err(Error::Unsupported(_))
        ));
        assert!(is_extremal(&o, &Point::coords(vec![-1.0, 0.0, 0.0]), 1e-9).is_err());
    }

    #[test]
    fn sampled_extremals_classify() {
        let mut rng = RngStream::new(2);
        for cone in [
            ConeSpec::Orthant { n: 4 },
            ConeSpec::Lorentz { d: 3 },
            ConeSpec::Psd { n: 3 },
            ConeSpec::Lexicographic,
            ConeSpec::ray(vec![0.6, 0.8]).unwrap(),
            ConeSpec::GridNonneg {
                grid: Grid::linspace(0.0, 1.0, 5).unwrap(),
            },
        ] {
            for _ in 0..100 {
                let p = sample_extremal(&cone, &mut rng).unwrap();
                assert!(is_extremal(&cone, &p, 1e-9).unwrap(), "{cone}: {p}");
                if let Ok(q) = sample_non_extremal(&cone, &mut rng) {
                    assert!(!is_extremal(&cone, &q, 1e-9).unwrap(), "{cone}: {q}");
                }
            }
        }
    }

    #[test]
    fn incomparable_examples() {
        let mut rng = RngStream::new(0);
        assert_eq!(
            find_incomparable(&ConeSpec::Orthant { n: 2 }, &mut rng, 10).unwrap(),
            Point::coords(vec![1.0, -1.0])
        );
        assert_eq!(
            find_incomparable(&ConeSpec::Lorentz { d: 2 }, &mut rng, 10).unwrap(),
            Point::coords(vec![1.0, 0.0, 0.0])
        );
        assert_eq!(
            find_incomparable(&ConeSpec::Lexicographic, &mut rng, 10),
            Err(Error::TotalOrder)
        );
        assert!(find_incomparable(&ConeSpec::Orthant { n: 1 }, &mut rng, 10).is_err());
        for cone in [
            ConeSpec::Psd { n: 2 },
            ConeSpec::Copositive { n: 3 },
            ConeSpec::ray(vec![0.0, 1.0]).unwrap(),
            ConeSpec::GridNonneg {
                grid: Grid::linspace(0.0, 1.0, 3).unwrap(),
            },
        ] {
            let p = find_incomparable(&cone, &mut rng, 10).unwrap();
            assert_eq!(classify(&cone, &p, 1e-9).unwrap().class, MembershipClass::Exterior);
            assert_eq!(classify(&cone, &p.neg(), 1e-9).unwrap().class, MembershipClass::Exterior);
        }
    }
}
