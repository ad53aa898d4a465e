use serde::Serialize;

use super::{classify, sample_point, ConeSpec, MembershipClass, Point, Region, DEFAULT_TOL, RAY_TOL};
use crate::error::{Error, Result};
use crate::numerics::{dot, norm2, simplex_quadratic_min, sym_eig, SymMat};
use crate::operators::Functional;
use crate::rng::RngStream;

/// A functional that separates an exterior point from the cone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Separation {
    pub functional: Functional,
    /// Value of the functional at the separated point; negative.
    pub value: f64,
    /// Set when no element of the dual cone can separate strictly (points
    /// `(0, y)` with `y < 0` of the lexicographic cone). The functional then
    /// separates the point but is nonnegative only on `K ∩ {x = 0}`.
    pub approximate: bool,
}

/// Draw a nonzero positive functional from the family associated with `cone`.
pub fn sample_dual(cone: &ConeSpec, rng: &mut RngStream) -> Functional {
    match cone {
        ConeSpec::Orthant { n } => Functional::DenseCovector {
            values: (0..*n).map(|_| rng.normal().abs() + 1e-3).collect(),
        },
        ConeSpec::Lorentz { d } => {
            let g = rng.normals(*d);
            let norm = norm2(&g);
            let r = rng.uniform();
            let xhat = if norm > 0.0 {
                g.iter().map(|v| r * v / norm).collect()
            } else {
                vec![0.0; *d]
            };
            Functional::SpinDual { xhat, scale: 1.0 }
        }
        ConeSpec::Psd { n } => {
            let k = 1 + rng.index(*n);
            let g: Vec<Vec<f64>> = (0..*n).map(|_| rng.normals(k)).collect();
            Functional::TraceForm {
                b: SymMat::from_upper(*n, |i, j| dot(&g[i], &g[j])),
            }
        }
        ConeSpec::Copositive { n } => {
            let k = 1 + rng.index(*n);
            Functional::CpForm {
                vectors: (0..k)
                    .map(|_| (0..*n).map(|_| rng.normal().abs() + 1e-3).collect())
                    .collect(),
            }
        }
        ConeSpec::GridNonneg { grid } => {
            let mut terms = vec![(rng.normal().abs() + 1e-3, Functional::TrapezoidIntegral { grid: grid.clone() })];
            for _ in 0..1 + rng.index(2) {
                terms.push((
                    rng.normal().abs(),
                    Functional::PointEvaluation {
                        grid: grid.clone(),
                        node: rng.index(grid.len()),
                    },
                ));
            }
            Functional::combination(terms)
        }
        ConeSpec::Lexicographic => Functional::LexFirstCoord.scaled(rng.normal().abs() + 1e-3),
        ConeSpec::Ray { direction } => {
            let g = rng.normals(direction.len());
            let along = dot(&g, direction);
            let t = rng.normal().abs() + 1e-3;
            Functional::DenseCovector {
                values: g
                    .iter()
                    .zip(direction)
                    .map(|(gi, di)| gi - along * di + t * di)
                    .collect(),
            }
        }
    }
}

/// Minimum of `f` over `samples` fresh cone samples.
///
/// A sampled falsifier for `f ∈ K′`: a negative result disproves membership,
/// a nonnegative one only fails to.
pub fn dual_min_on_samples(cone: &ConeSpec, f: &Functional, rng: &mut RngStream, samples: usize) -> Result<f64> {
    let mut worst = f64::INFINITY;
    for p in cone.canonical_generators() {
        worst = worst.min(f.eval(&p)?);
    }
    for _ in 0..samples {
        let p = sample_point(cone, Region::Cone, rng)?;
        worst = worst.min(f.eval(&p)? / (1.0 + p.norm_inf()));
    }
    Ok(worst)
}

/// The positive functional that certifies the margin of `p`: its value at
/// `p` equals (or, for the lexicographic cone, bounds) the margin.
///
/// Returns the functional and whether it is only approximately in `K′`.
pub fn supporting_functional(cone: &ConeSpec, p: &Point) -> Result<(Functional, bool)> {
    cone.check_point(p)?;
    Ok(match (cone, p) {
        (ConeSpec::Orthant { n }, Point::Coordinates { values }) => {
            let k = argmin(values);
            let mut e = vec![0.0; *n];
            e[k] = 1.0;
            (Functional::DenseCovector { values: e }, false)
        }
        (ConeSpec::GridNonneg { grid }, Point::GridFunction { values, .. }) => (
            Functional::PointEvaluation {
                grid: grid.clone(),
                node: argmin(values),
            },
            false,
        ),
        (ConeSpec::Lorentz { d }, Point::Coordinates { values }) => {
            let x = &values[..*d];
            let norm = norm2(x);
            let xhat = if norm > 0.0 {
                x.iter().map(|v| -v / norm).collect()
            } else {
                vec![0.0; *d]
            };
            (Functional::SpinDual { xhat, scale: 1.0 }, false)
        }
        (ConeSpec::Psd { .. }, Point::Matrix { matrix }) => {
            let s = sym_eig(matrix)?;
            (
                Functional::TraceForm {
                    b: SymMat::outer(&s.vectors[0]),
                },
                false,
            )
        }
        (ConeSpec::Copositive { .. }, Point::Matrix { matrix }) => {
            let m = simplex_quadratic_min(matrix)?;
            (Functional::CpForm { vectors: vec![m.argmin] }, false)
        }
        (ConeSpec::Ray { direction }, Point::Coordinates { values }) => {
            let along = dot(values, direction);
            let off: Vec<f64> = values.iter().zip(direction).map(|(v, d)| v - along * d).collect();
            let off_norm = norm2(&off);
            let values = if off_norm > RAY_TOL {
                off.iter().map(|v| -v / off_norm).collect()
            } else if along < 0.0 || direction.len() == 1 {
                direction.clone()
            } else {
                orthogonal_unit(direction)
            };
            (Functional::DenseCovector { values }, false)
        }
        (ConeSpec::Lexicographic, Point::Coordinates { values }) => {
            if values[0] == 0.0 && values[1] < 0.0 {
                (Functional::DenseCovector { values: vec![0.0, 1.0] }, true)
            } else {
                (Functional::LexFirstCoord, false)
            }
        }
        _ => unreachable!("shape checked above"),
    })
}

/// A functional in `K′` strictly negative at the exterior point `p`.
pub fn separating_functional(cone: &ConeSpec, p: &Point) -> Result<Separation> {
    let verdict = classify(cone, p, DEFAULT_TOL)?;
    if verdict.class != MembershipClass::Exterior {
        return Err(Error::NotExterior { margin: verdict.margin });
    }
    let (functional, approximate) = supporting_functional(cone, p)?;
    let value = functional.eval(p)?;
    Ok(Separation {
        functional,
        value,
        approximate,
    })
}

/// A nonzero `u ∈ K` and nonzero `f ∈ K′` with `f(u) = 0`.
pub fn dual_zero_pair(cone: &ConeSpec) -> Result<(Point, Functional)> {
    match cone {
        ConeSpec::Orthant { n } if *n >= 2 => {
            let mut e2 = vec![0.0; *n];
            e2[1] = 1.0;
            Ok((Point::unit(*n, 0), Functional::DenseCovector { values: e2 }))
        }
        ConeSpec::Lorentz { d } => {
            let mut u = vec![0.0; d + 1];
            u[0] = 1.0;
            u[*d] = 1.0;
            let mut xhat = vec![0.0; *d];
            xhat[0] = -1.0;
            Ok((Point::coords(u), Functional::SpinDual { xhat, scale: 1.0 }))
        }
        ConeSpec::Psd { n } if *n >= 2 => {
            let mut e1 = vec![0.0; *n];
            e1[0] = 1.0;
            let mut e2 = vec![0.0; *n];
            e2[1] = 1.0;
            Ok((
                Point::matrix(SymMat::outer(&e1)),
                Functional::TraceForm { b: SymMat::outer(&e2) },
            ))
        }
        ConeSpec::GridNonneg { grid } => {
            let mut hat = vec![0.0; grid.len()];
            hat[0] = 1.0;
            Ok((
                Point::GridFunction {
                    grid: grid.clone(),
                    values: hat,
                },
                Functional::PointEvaluation {
                    grid: grid.clone(),
                    node: grid.len() - 1,
                },
            ))
        }
        ConeSpec::Orthant { .. } | ConeSpec::Psd { .. } => {
            Err(Error::precondition("a dual-zero pair needs dimension at least 2"))
        }
        _ => Err(Error::unsupported(format!("no explicit dual-zero pair for {cone}"))),
    }
}

fn argmin(v: &[f64]) -> usize {
    let mut k = 0;
    for (i, &x) in v.iter().enumerate() {
        if x < v[k] {
            k = i;
        }
    }
    k
}

/// A unit vector orthogonal to `d` (Gram-Schmidt against the basis vector
/// least aligned with `d`).
pub(crate) fn orthogonal_unit(d: &[f64]) -> Vec<f64> {
    let k = argmin(&d.iter().map(|v| v.abs()).collect::<Vec<_>>());
    let mut w: Vec<f64> = d.iter().map(|di| -d[k] * di).collect();
    w[k] += 1.0;
    let norm = norm2(&w);
    w.iter().map(|v| v / norm).collect()
}
