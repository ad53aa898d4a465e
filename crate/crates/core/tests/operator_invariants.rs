use conewit::cones::{classify, margin, sample_ambient, sample_point, ConeSpec, Grid, MembershipClass, Region};
use conewit::operators::{
    inverse_residual, is_positive_map, rank_one_perturb, reverse_residual, sample_perturbation, Functional, LinearMap,
};
use conewit::witnesses::{boundary_crossing, nonpositive_inverse_witness, BISECTION_TOL};
use conewit::RngStream;
use proptest::prelude::*;

fn cone_for(family: usize, size: usize) -> ConeSpec {
    match family {
        0 => ConeSpec::Orthant { n: 1 + size % 6 },
        1 => ConeSpec::Lorentz { d: 1 + size % 5 },
        2 => ConeSpec::Psd { n: 1 + size % 4 },
        3 => ConeSpec::Copositive { n: 1 + size % 3 },
        4 => ConeSpec::Lexicographic,
        5 => ConeSpec::Ray { direction: vec![0.6, 0.0, 0.8] },
        _ => ConeSpec::GridNonneg { grid: Grid::linspace(0.0, 1.0, 2 + size % 8).unwrap() },
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inverse_is_two_sided(family in 0usize..7, size in 0usize..12, seed in any::<u64>()) {
        let cone = cone_for(family, size);
        let mut rng = RngStream::new(seed);
        let (s, f, u) = sample_perturbation(&cone, &mut rng).unwrap();
        let t = LinearMap::rank_one(s, f, u);
        prop_assert!(inverse_residual(&t, &cone, &mut rng, 20).unwrap() <= 1e-9);
        prop_assert!(reverse_residual(&t, &cone, &mut rng, 20).unwrap() <= 1e-9);
    }

    #[test]
    fn validated_operators_are_positive(family in 0usize..7, size in 0usize..12, seed in any::<u64>()) {
        let cone = cone_for(family, size);
        let mut rng = RngStream::new(seed);
        let (s, f, u) = sample_perturbation(&cone, &mut rng).unwrap();
        let (t, _) = rank_one_perturb(&s, &f, &u, &cone, &mut rng).unwrap();
        prop_assert!(is_positive_map(&t, &cone, &mut rng, 300, 1e-9).unwrap().positive);
    }

    #[test]
    fn margins_are_positively_homogeneous(family in 0usize..7, size in 0usize..12, seed in any::<u64>(), c in 0.01f64..100.0) {
        let cone = cone_for(family, size);
        prop_assume!(cone != ConeSpec::Lexicographic);
        let p = sample_ambient(&cone, &mut RngStream::new(seed));
        let (a, b) = (margin(&cone, &p.scale(c)).unwrap(), c * margin(&cone, &p).unwrap());
        prop_assert!((a - b).abs() <= 1e-9 * c * (1.0 + p.norm_inf()), "{} vs {}", a, b);
    }

    #[test]
    fn reported_witnesses_meet_the_bounds(family in 0usize..7, size in 0usize..12, seed in any::<u64>()) {
        let cone = cone_for(family, size);
        let mut rng = RngStream::new(seed);
        let (s, f, u) = sample_perturbation(&cone, &mut rng).unwrap();
        let t = LinearMap::rank_one(s, f, u);
        let w = nonpositive_inverse_witness(&t, &cone, &mut rng, 200).unwrap();
        prop_assert!(w.is_sound(&t, &cone));
        if w.found {
            prop_assert!(w.y_margin.unwrap() >= -1e-9);
            prop_assert!(w.x_margin.unwrap() < -1e-6);
            prop_assert!(w.residual.unwrap() <= 1e-9);
        }
    }

    #[test]
    fn crossing_lies_on_the_boundary(family in 0usize..4, size in 0usize..12, seed in any::<u64>()) {
        let cone = [ConeSpec::Orthant { n: 1 + size % 5 }, ConeSpec::Lorentz { d: 1 + size % 4 },
                    ConeSpec::Psd { n: 1 + size % 3 }, ConeSpec::Copositive { n: 1 + size % 3 }][family].clone();
        let mut rng = RngStream::new(seed);
        let u = sample_point(&cone, Region::Interior, &mut rng).unwrap();
        let v = sample_point(&cone, Region::Exterior, &mut rng).unwrap();
        let r = boundary_crossing(&cone, &u, &v, BISECTION_TOL).unwrap();
        prop_assert_eq!(r.verdict_at_c.class, MembershipClass::Boundary);
        let dir = v.sub(&u).unwrap();
        let inside = u.axpy((r.c - 1e-6).max(0.0), &dir).unwrap();
        prop_assert!(classify(&cone, &inside, r.verdict_tol).unwrap().in_cone());
    }
}

#[test]
fn orthant_doubling_has_diagonal_inverse() {
    let n = 5;
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    let t = LinearMap::rank_one(LinearMap::Identity, Functional::covector(e1.clone()), conewit::cones::Point::coords(e1));
    for i in 0..n {
        let y = conewit::cones::Point::unit(n, i);
        let x = t.apply_inverse(&y).unwrap();
        let mut want = vec![0.0; n];
        want[i] = if i == 0 { 0.5 } else { 1.0 };
        assert_eq!(x.raw(), want.as_slice());
    }
}
