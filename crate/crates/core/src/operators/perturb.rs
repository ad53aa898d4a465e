use serde::Serialize;

use super::{pullback, random_orthogonal, Functional, LinearMap};
use crate::cones::{
    classify, dual_min_on_samples, margin, sample_ambient, sample_dual, sample_point, ConeSpec, MembershipClass, Point,
    Region, DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::numerics::{norm2, Mat};
use crate::rng::RngStream;

/// Samples used by the eager hypothesis checks of [`rank_one_perturb`].
const VALIDATION_SAMPLES: usize = 1000;

/// Outcome of a sampled positivity check.
///
/// Sampling can only refute positivity: `positive == true` means no sampled
/// cone element was mapped outside the cone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityCheck {
    pub positive: bool,
    pub samples: usize,
    pub worst_margin: f64,
    pub counterexample: Option<Point>,
}

/// Which optional hypotheses hold for a constructed perturbation. Invertibility
/// and positivity need none of them; the witness searches do.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Validation {
    pub u_interior: bool,
    pub u_margin: f64,
    pub f_at_u: f64,
    /// Smallest sampled value of `f` on the cone, normalised by `1 + ‖p‖∞`.
    pub f_sampled_min: f64,
    /// Whether `f` is positive on some canonical extremal; `None` when the
    /// cone has no extremality test.
    pub f_positive_on_extremal: Option<bool>,
}

fn check_positive(
    cone: &ConeSpec,
    rng: &mut RngStream,
    samples: usize,
    tol: f64,
    map: impl Fn(&Point) -> Result<Point>,
) -> Result<PositivityCheck> {
    let mut worst = f64::INFINITY;
    let mut counterexample = None;
    let mut count = 0;
    let mut test = |x: Point| -> Result<()> {
        count += 1;
        let m = margin(cone, &map(&x)?)?;
        if m < worst {
            worst = m;
        }
        if m < -tol && counterexample.is_none() {
            counterexample = Some(x);
        }
        Ok(())
    };
    for g in cone.canonical_generators() {
        test(g)?;
    }
    if let Some(e) = cone.order_unit() {
        test(e)?;
    }
    for _ in 0..samples {
        test(sample_point(cone, Region::Cone, rng)?)?;
    }
    Ok(PositivityCheck {
        positive: counterexample.is_none(),
        samples: count,
        worst_margin: worst,
        counterexample,
    })
}

/// Sampled falsifier for `T[K] ⊆ K`: every canonical generator, the order
/// unit and `samples` random cone elements are mapped and tested at `tol`.
pub fn is_positive_map(t: &LinearMap, cone: &ConeSpec, rng: &mut RngStream, samples: usize, tol: f64) -> Result<PositivityCheck> {
    check_positive(cone, rng, samples, tol, |x| t.apply(x))
}

/// [`is_positive_map`] for `T⁻¹`.
pub fn is_positive_inverse(
    t: &LinearMap,
    cone: &ConeSpec,
    rng: &mut RngStream,
    samples: usize,
    tol: f64,
) -> Result<PositivityCheck> {
    check_positive(cone, rng, samples, tol, |y| t.apply_inverse(y))
}

/// `max ‖T(T⁻¹y) − y‖∞ / (1 + ‖y‖∞)` over gaussian `y` of the ambient space.
pub fn inverse_residual(t: &LinearMap, cone: &ConeSpec, rng: &mut RngStream, samples: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let y = sample_ambient(cone, rng);
        let back = t.apply(&t.apply_inverse(&y)?)?;
        worst = worst.max(back.dist_inf(&y)? / (1.0 + y.norm_inf()));
    }
    Ok(worst)
}

/// `max ‖T⁻¹(Tx) − x‖∞ / (1 + ‖x‖∞)` over gaussian `x`.
pub fn reverse_residual(t: &LinearMap, cone: &ConeSpec, rng: &mut RngStream, samples: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = sample_ambient(cone, rng);
        let back = t.apply_inverse(&t.apply(&x)?)?;
        worst = worst.max(back.dist_inf(&x)? / (1.0 + x.norm_inf()));
    }
    Ok(worst)
}

/// Build `T(x) = Sx + f(x)u` after checking `u ∈ K∖{0}`, `f ∈ K′∖{0}` and
/// that `S` and `S⁻¹` are positive (the last two by sampling).
pub fn rank_one_perturb(
    s: &LinearMap,
    f: &Functional,
    u: &Point,
    cone: &ConeSpec,
    rng: &mut RngStream,
) -> Result<(LinearMap, Validation)> {
    cone.validate()?;
    cone.check_point(u)?;
    let u_verdict = classify(cone, u, DEFAULT_TOL)?;
    if u_verdict.class == MembershipClass::Exterior || u.norm() <= 1e-9 {
        return Err(Error::NotInCone(format!("u has margin {} and norm {}", u_verdict.margin, u.norm())));
    }
    let f_at_u = f.eval(u)?;
    f.check_parameters()?;
    if !f.is_nonzero() {
        return Err(Error::NotPositiveFunctional("f is zero".into()));
    }
    let f_sampled_min = dual_min_on_samples(cone, f, rng, VALIDATION_SAMPLES)?;
    if f_sampled_min < -1e-10 {
        return Err(Error::NotPositiveFunctional(format!("f takes the value {f_sampled_min} on the cone")));
    }
    if !s.has_closed_form_inverse() {
        return Err(Error::NotAutomorphism(format!("{} has no closed-form inverse", s.kind())));
    }
    s.apply(u)?;
    let forward = is_positive_map(s, cone, rng, VALIDATION_SAMPLES, DEFAULT_TOL)?;
    if !forward.positive {
        return Err(Error::NotAutomorphism(format!("S maps a cone element to margin {}", forward.worst_margin)));
    }
    let backward = is_positive_inverse(s, cone, rng, VALIDATION_SAMPLES, DEFAULT_TOL)?;
    if !backward.positive {
        return Err(Error::NotAutomorphism(format!("S⁻¹ maps a cone element to margin {}", backward.worst_margin)));
    }
    let f_positive_on_extremal = match cone {
        ConeSpec::Copositive { .. } => None,
        _ => {
            let mut any = false;
            for g in cone.canonical_generators() {
                any |= f.eval(&g)? > 1e-9;
            }
            Some(any)
        }
    };
    let validation = Validation {
        u_interior: u_verdict.class == MembershipClass::Interior,
        u_margin: u_verdict.margin,
        f_at_u,
        f_sampled_min,
        f_positive_on_extremal,
    };
    Ok((LinearMap::rank_one(s.clone(), f.clone(), u.clone()), validation))
}

/// `Tₙ = S + n(f∘S)u`, whose inverse is `y ↦ S⁻¹y − n·f(y)·S⁻¹u` when `f(u) = 0`.
pub fn scaled_family(s: &LinearMap, f: &Functional, u: &Point, n: u64) -> LinearMap {
    LinearMap::rank_one(s.clone(), pullback(f, s).scaled(n as f64), u.clone())
}

/// A random automorphism of `cone`.
///
/// Copositive automorphisms are congruences by a permutation times a
/// positive diagonal matrix, which map the nonnegative orthant onto itself.
pub fn sample_automorphism(cone: &ConeSpec, rng: &mut RngStream) -> LinearMap {
    let positive = |rng: &mut RngStream, n: usize| -> Vec<f64> { (0..n).map(|_| rng.uniform_range(0.5, 2.0)).collect() };
    match cone {
        ConeSpec::Orthant { n } => LinearMap::PermDiag {
            perm: rng.permutation(*n),
            diag: positive(rng, *n),
        },
        ConeSpec::GridNonneg { grid } => {
            let n = grid.len();
            let perm = if grid.is_symmetric() && rng.coin() {
                (0..n).rev().collect()
            } else {
                (0..n).collect()
            };
            LinearMap::PermDiag {
                perm,
                diag: positive(rng, n),
            }
        }
        ConeSpec::Lorentz { d } => LinearMap::SpinAuto {
            q: random_orthogonal(rng, *d),
            rho: rng.uniform_range(0.5, 2.0),
        },
        ConeSpec::Psd { n } => {
            let g = Mat::from_fn(*n, |_, _| rng.normal());
            let norm = norm2(&g.rows().concat()).max(1e-12);
            let m = Mat::from_fn(*n, |i, j| if i == j { 1.0 } else { 0.0 } + 0.5 * g.get(i, j) / norm);
            LinearMap::congruence(m).expect("singular values lie in [0.5, 1.5]")
        }
        ConeSpec::Copositive { n } => {
            let perm = rng.permutation(*n);
            let d = positive(rng, *n);
            let m = Mat::from_fn(*n, |i, j| if perm[i] == j { d[i] } else { 0.0 });
            LinearMap::congruence(m).expect("permutation times positive diagonal")
        }
        ConeSpec::Lexicographic => LinearMap::rank_one(
            LinearMap::PermDiag {
                perm: vec![0, 1],
                diag: positive(rng, 2),
            },
            Functional::covector(vec![rng.normal() * 2.0, 0.0]),
            Point::coords(vec![0.0, 1.0]),
        ),
        ConeSpec::Ray { direction } => {
            let n = direction.len();
            let mu = rng.uniform_range(0.5, 2.0);
            let lambda = rng.uniform_range(0.5, 2.0);
            let g = rng.normals(n);
            let along = crate::numerics::dot(&g, direction);
            // T(x) = μx + ((λ − μ)⟨d̂, x⟩ + ⟨w, x⟩) d̂ with w ⟂ d̂, so T(d̂) = λd̂.
            let c: Vec<f64> = g
                .iter()
                .zip(direction)
                .map(|(gi, di)| 0.5 * (gi - along * di) + (lambda - mu) * di)
                .collect();
            LinearMap::rank_one(
                LinearMap::PermDiag {
                    perm: (0..n).collect(),
                    diag: vec![mu; n],
                },
                Functional::covector(c),
                Point::coords(direction.clone()),
            )
        }
    }
}

/// Random `(S, f, u)` for `cone`: a sampled automorphism, a sampled positive
/// functional and a nonzero cone element, interior whenever the interior is
/// nonempty.
pub fn sample_perturbation(cone: &ConeSpec, rng: &mut RngStream) -> Result<(LinearMap, Functional, Point)> {
    let s = sample_automorphism(cone, rng);
    let f = sample_dual(cone, rng);
    let region = if cone.has_interior() { Region::Interior } else { Region::Cone };
    let mut u = sample_point(cone, region, rng)?;
    while u.norm() <= 1e-6 {
        u = sample_point(cone, region, rng)?;
    }
    Ok((s, f, u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::Grid;
    use crate::numerics::SymMat;

    fn c(v: &[f64]) -> Point {
        Point::coords(v.to_vec())
    }

    fn all_cones() -> Vec<ConeSpec> {
        vec![
            ConeSpec::Orthant { n: 4 },
            ConeSpec::Lorentz { d: 3 },
            ConeSpec::Psd { n: 3 },
            ConeSpec::Copositive { n: 3 },
            ConeSpec::Lexicographic,
            ConeSpec::ray(vec![0.0, 0.6, 0.8]).unwrap(),
            ConeSpec::GridNonneg {
                grid: Grid::linspace(-1.0, 1.0, 5).unwrap(),
            },
        ]
    }

    #[test]
    fn rank_one_perturb_examples() {
        let mut rng = RngStream::new(0);
        let lorentz = ConeSpec::Lorentz { d: 2 };
        let (_, v) = rank_one_perturb(
            &LinearMap::Identity,
            &Functional::spin_dual(vec![0.6, 0.8]),
            &c(&[0.0, 0.0, 1.0]),
            &lorentz,
            &mut rng,
        )
        .unwrap();
        assert!(v.u_interior);

        let r = rank_one_perturb(
            &LinearMap::Identity,
            &Functional::covector(vec![1.0, 0.0, 0.0]),
            &c(&[-1.0, 0.0, 0.0]),
            &ConeSpec::Orthant { n: 3 },
            &mut rng,
        );
        assert!(matches!(r, Err(Error::NotInCone(_))));

        let psd = ConeSpec::Psd { n: 3 };
        let (_, v) = rank_one_perturb(
            &LinearMap::Identity,
            &Functional::TraceForm { b: SymMat::identity(3) },
            &Point::matrix(SymMat::identity(3)),
            &psd,
            &mut rng,
        )
        .unwrap();
        assert!(v.u_interior);
        assert_eq!(v.f_at_u, 3.0);
    }

    #[test]
    fn rank_one_perturb_rejects_bad_functionals_and_maps() {
        let mut rng = RngStream::new(1);
        let o = ConeSpec::Orthant { n: 2 };
        let r = rank_one_perturb(&LinearMap::Identity, &Functional::covector(vec![1.0, -1.0]), &c(&[1.0, 1.0]), &o, &mut rng);
        assert!(matches!(r, Err(Error::NotPositiveFunctional(_))));
        let neg = LinearMap::Dense {
            matrix: Mat::from_rows(&[vec![-1.0, 0.0], vec![0.0, -1.0]]).unwrap(),
        };
        let r = rank_one_perturb(&neg, &Functional::covector(vec![1.0, 1.0]), &c(&[1.0, 1.0]), &o, &mut rng);
        assert!(matches!(r, Err(Error::NotAutomorphism(_))));
        let shear = LinearMap::rank_one(LinearMap::Identity, Functional::covector(vec![0.0, 1.0]), c(&[1.0, 0.0]));
        let r = rank_one_perturb(&shear, &Functional::covector(vec![1.0, 1.0]), &c(&[1.0, 1.0]), &o, &mut rng);
        assert!(matches!(r, Err(Error::NotAutomorphism(_))));
    }

    #[test]
    fn positivity_examples() {
        let mut rng = RngStream::new(2);
        for cone in all_cones() {
            assert!(is_positive_map(&LinearMap::Identity, &cone, &mut rng, 100, 1e-9).unwrap().positive);
        }
        let neg = LinearMap::Dense {
            matrix: Mat::from_rows(&[vec![-1.0, 0.0], vec![0.0, -1.0]]).unwrap(),
        };
        let check = is_positive_map(&neg, &ConeSpec::Orthant { n: 2 }, &mut rng, 10, 1e-9).unwrap();
        assert!(!check.positive);
        assert_eq!(check.counterexample, Some(c(&[1.0, 0.0])));
    }

    #[test]
    fn sampled_automorphisms_are_automorphisms() {
        let mut rng = RngStream::new(3);
        for cone in all_cones() {
            for _ in 0..10 {
                let s = sample_automorphism(&cone, &mut rng);
                assert!(is_positive_map(&s, &cone, &mut rng, 300, 1e-9).unwrap().positive, "{cone}: {s}");
                assert!(is_positive_inverse(&s, &cone, &mut rng, 300, 1e-9).unwrap().positive, "{cone}: {s}");
                assert!(inverse_residual(&s, &cone, &mut rng, 20).unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn scaled_family_inverse_formula() {
        let s = LinearMap::Identity;
        let f = Functional::covector(vec![0.0, 1.0, 0.0]);
        let u = c(&[1.0, 0.0, 0.0]);
        let e2 = c(&[0.0, 1.0, 0.0]);
        assert_eq!(scaled_family(&s, &f, &u, 1).apply_inverse(&e2).unwrap(), c(&[-1.0, 1.0, 0.0]));
        assert_eq!(scaled_family(&s, &f, &u, 3).apply_inverse(&e2).unwrap(), c(&[-3.0, 1.0, 0.0]));
        let y = c(&[2.0, 0.0, 5.0]);
        assert_eq!(scaled_family(&s, &f, &u, 7).apply_inverse(&y).unwrap(), y);
    }

    #[test]
    fn sampled_perturbations_invert_and_stay_positive() {
        let mut rng = RngStream::new(4);
        for cone in all_cones() {
            for _ in 0..5 {
                let (s, f, u) = sample_perturbation(&cone, &mut rng).unwrap();
                let (t, _) = rank_one_perturb(&s, &f, &u, &cone, &mut rng).unwrap();
                assert!(inverse_residual(&t, &cone, &mut rng, 50).unwrap() <= 1e-9);
                assert!(reverse_residual(&t, &cone, &mut rng, 50).unwrap() <= 1e-9);
                assert!(is_positive_map(&t, &cone, &mut rng, 500, 1e-9).unwrap().positive, "{cone}: {t}");
                let inv = t.inverse().unwrap();
                let y = sample_ambient(&cone, &mut rng);
                assert!(inv.apply(&y).unwrap().dist_inf(&t.apply_inverse(&y).unwrap()).unwrap() <= 1e-10);
            }
        }
    }
}
