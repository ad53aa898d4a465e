//! Positive functionals, cone automorphisms and the rank-one perturbation
//! `T(x) = Sx + f(x)u` together with its closed-form inverse.

mod functional;
mod map;
mod perturb;

pub use functional::{Functional, Term};
pub use map::LinearMap;
pub use perturb::{
    inverse_residual, is_positive_map, is_positive_inverse, rank_one_perturb, reverse_residual, sample_automorphism,
    sample_perturbation, scaled_family, PositivityCheck, Validation,
};

use crate::numerics::Mat;

/// `f ∘ S`, in structured form whenever the composition stays in a
/// structured family, and as a [`Functional::Composed`] wrapper otherwise.
pub fn pullback(f: &Functional, s: &LinearMap) -> Functional {
    structured_pullback(f, s).unwrap_or_else(|| Functional::Composed {
        outer: Box::new(f.clone()),
        map: Box::new(s.clone()),
    })
}

fn structured_pullback(f: &Functional, s: &LinearMap) -> Option<Functional> {
    if let LinearMap::Identity = s {
        return Some(f.clone());
    }
    if let Functional::Combination { terms } = f {
        return Some(Functional::Combination {
            terms: terms
                .iter()
                .map(|t| Term {
                    weight: t.weight,
                    functional: pullback(&t.functional, s),
                })
                .collect(),
        });
    }
    if let LinearMap::RankOnePerturbed { s: inner, f: g, u } = s {
        // f(Sx + g(x)u) = (f∘S)(x) + f(u)·g(x)
        let fu = f.eval(u).ok()?;
        return Some(Functional::combination(vec![(1.0, pullback(f, inner)), (fu, g.clone())]));
    }
    match (f, s) {
        (Functional::DenseCovector { values }, LinearMap::PermDiag { perm, diag }) if values.len() == perm.len() => {
            let mut out = vec![0.0; values.len()];
            for (i, (&j, d)) in perm.iter().zip(diag).enumerate() {
                out[j] = values[i] * d;
            }
            Some(Functional::covector(out))
        }
        (Functional::LexFirstCoord, LinearMap::PermDiag { perm, diag }) if perm.len() == 2 => Some(if perm[0] == 0 {
            Functional::LexFirstCoord.scaled(diag[0])
        } else {
            Functional::covector(vec![0.0, diag[0]])
        }),
        (
            Functional::TrapezoidIntegral { grid } | Functional::PointEvaluation { grid, .. },
            LinearMap::PermDiag { .. },
        ) => structured_pullback(&Functional::covector(f.grid_weights(grid)?), s),
        (Functional::DenseCovector { values }, LinearMap::Dense { matrix }) if values.len() == matrix.n() => {
            Some(Functional::covector(matrix.tmul_vec(values)))
        }
        (Functional::SpinDual { xhat, scale }, LinearMap::SpinAuto { q, rho }) if xhat.len() == q.n() => {
            Some(Functional::SpinDual {
                xhat: q.tmul_vec(xhat),
                scale: scale * rho,
            })
        }
        (Functional::TraceForm { b }, LinearMap::Congruence { m, .. }) if b.n() == m.n() => Some(Functional::TraceForm {
            b: map::congruence(&m.transpose(), b),
        }),
        (Functional::CpForm { vectors }, LinearMap::Congruence { m, .. }) if vectors.iter().all(|v| v.len() == m.n()) => {
            Some(Functional::CpForm {
                vectors: vectors.iter().map(|v| m.tmul_vec(v)).collect(),
            })
        }
        _ => None,
    }
}

/// Orthogonal `d × d` matrix from Gram-Schmidt on a gaussian matrix.
pub(crate) fn random_orthogonal(rng: &mut crate::rng::RngStream, d: usize) -> Mat {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v = rng.normals(d);
        for c in &cols {
            let p = crate::numerics::dot(&v, c);
            for (a, b) in v.iter_mut().zip(c) {
                *a -= p * b;
            }
        }
        let norm = crate::numerics::norm2(&v);
        if norm > 1e-3 {
            cols.push(v.iter().map(|x| x / norm).collect());
        }
    }
    Mat::from_fn(d, |i, j| cols[j][i])
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::{sample_ambient, ConeSpec, Grid, Point};
    use crate::numerics::SymMat;
    use crate::rng::RngStream;

    fn c(v: &[f64]) -> Point {
        Point::coords(v.to_vec())
    }

    #[test]
    fn pullback_examples() {
        let s = LinearMap::perm_diag(vec![0, 1], vec![2.0, 3.0]).unwrap();
        assert_eq!(pullback(&Functional::covector(vec![1.0, 1.0]), &s), Functional::covector(vec![2.0, 3.0]));
        let swap = LinearMap::perm_diag(vec![1, 0], vec![1.0, 1.0]).unwrap();
        assert_eq!(pullback(&Functional::covector(vec![0.0, 1.0]), &swap), Functional::covector(vec![1.0, 0.0]));

        let theta: f64 = 0.3;
        let q = Mat::from_rows(&[vec![theta.cos(), -theta.sin()], vec![theta.sin(), theta.cos()]]).unwrap();
        let s = LinearMap::spin_auto(q.clone(), 2.0).unwrap();
        let g = pullback(&Functional::spin_dual(vec![0.6, 0.8]), &s);
        match &g {
            Functional::SpinDual { xhat, scale } => {
                assert_eq!(*scale, 2.0);
                let expect = q.tmul_vec(&[0.6, 0.8]);
                assert!(xhat.iter().zip(&expect).all(|(a, b)| (a - b).abs() < 1e-15));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pullback_agrees_with_composition() {
        let mut rng = RngStream::new(5);
        let grid = Grid::linspace(-1.0, 1.0, 5).unwrap();
        let cases: Vec<(ConeSpec, Functional, LinearMap)> = vec![
            (
                ConeSpec::Psd { n: 3 },
                Functional::TraceForm { b: SymMat::diag(&[1.0, 2.0, 0.5]) },
                LinearMap::congruence(Mat::from_fn(3, |i, j| if i == j { 2.0 } else { 0.3 * (i + 2 * j) as f64 })).unwrap(),
            ),
            (
                ConeSpec::Copositive { n: 2 },
                Functional::CpForm {
                    vectors: vec![vec![1.0, 0.5]],
                },
                LinearMap::congruence(Mat::from_rows(&[vec![0.0, 2.0], vec![1.0, 0.0]]).unwrap()).unwrap(),
            ),
            (
                ConeSpec::GridNonneg { grid: grid.clone() },
                Functional::combination(vec![
                    (1.0, Functional::TrapezoidIntegral { grid: grid.clone() }),
                    (0.5, Functional::PointEvaluation { grid: grid.clone(), node: 1 }),
                ]),
                LinearMap::perm_diag(vec![4, 3, 2, 1, 0], vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(),
            ),
            (
                ConeSpec::Lexicographic,
                Functional::LexFirstCoord,
                LinearMap::rank_one(
                    LinearMap::perm_diag(vec![0, 1], vec![1.0, 2.0]).unwrap(),
                    Functional::covector(vec![5.0, 0.0]),
                    c(&[0.0, 1.0]),
                ),
            ),
            (
                ConeSpec::Orthant { n: 2 },
                Functional::covector(vec![1.0, 2.0]),
                LinearMap::Dense {
                    matrix: Mat::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap(),
                },
            ),
        ];
        for (cone, f, s) in cases {
            let g = pullback(&f, &s);
            assert!(g.is_structured(), "{g:?}");
            for _ in 0..100 {
                let p = sample_ambient(&cone, &mut rng);
                let lhs = g.eval(&p).unwrap();
                let rhs = f.eval(&s.apply(&p).unwrap()).unwrap();
                assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()), "{cone}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn unstructured_pullback_falls_back_to_composition() {
        let s = LinearMap::perm_diag(vec![1, 0, 2], vec![1.0, 2.0, 3.0]).unwrap();
        let f = Functional::spin_dual(vec![0.6, 0.8]);
        let g = pullback(&f, &s);
        assert!(!g.is_structured());
        let p = c(&[1.0, 2.0, 3.0]);
        assert_eq!(g.eval(&p).unwrap(), f.eval(&s.apply(&p).unwrap()).unwrap());
    }

    #[test]
    fn random_orthogonal_is_orthogonal() {
        let mut rng = RngStream::new(1);
        for d in 1..6 {
            let q = random_orthogonal(&mut rng, d);
            let qtq = q.transpose().mul(&q);
            for i in 0..d {
                for j in 0..d {
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((qtq.get(i, j) - e).abs() < 1e-12);
                }
            }
        }
    }
}
