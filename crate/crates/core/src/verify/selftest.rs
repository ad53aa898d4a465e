//! The default suite: operator-level checks over all cone families, the
//! property suites and the golden scenarios.

use std::time::Instant;

use super::examples::run_paper_examples;
use super::properties::property_sections;
use super::report::{num, Report, Section};
use crate::cones::{margin, sample_dual, sample_point, ConeSpec, Grid, MembershipClass, Point, Region};
use crate::error::Result;
use crate::numerics::{simplex_grid_min, simplex_quadratic_min, SymMat};
use crate::operators::{
    inverse_residual, is_positive_map, rank_one_perturb, reverse_residual, sample_automorphism, sample_perturbation,
    scaled_family, Functional, LinearMap,
};
use crate::rng::RngStream;
use crate::witnesses::{boundary_crossing, nonpositive_inverse_witness, smallest_scaling_n, BISECTION_TOL};

fn grid_cone(m: usize) -> ConeSpec {
    ConeSpec::GridNonneg {
        grid: Grid::linspace(0.0, 1.0, m).expect("m >= 2"),
    }
}

fn random_ray(rng: &mut RngStream, n: usize) -> ConeSpec {
    loop {
        let g = rng.normals(n);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return ConeSpec::Ray {
                direction: g.iter().map(|v| v / norm).collect(),
            };
        }
    }
}

/// One cone of family `family` (0..7), size cycling with `k`.
fn family_cone(family: usize, k: usize, rng: &mut RngStream) -> ConeSpec {
    match family {
        0 => ConeSpec::Orthant { n: 2 + k % 5 },
        1 => ConeSpec::Lorentz { d: 1 + k % 5 },
        2 => ConeSpec::Psd { n: 2 + k % 3 },
        3 => ConeSpec::Copositive { n: 2 + k % 2 },
        4 => ConeSpec::Lexicographic,
        5 => random_ray(rng, 1 + k % 4),
        _ => grid_cone(5 + k % 5),
    }
}

fn timed(name: &str, f: impl FnOnce(&mut Section) -> Result<()>) -> Section {
    let start = Instant::now();
    let mut sec = Section::new(name);
    if let Err(e) = f(&mut sec) {
        sec.check("completed", "ok", format!("error: {e}"), false);
    }
    sec.runtime = start.elapsed();
    sec
}

/// 200 seeded `(cone, S, f, u)` configurations across the seven families:
/// both composition residuals on 100 ambient points each.
pub fn inverse_exactness(seed: u64) -> Section {
    timed("selftest inverse-exactness", |sec| {
        let rng = RngStream::new(seed).split_named("inverse-exactness");
        let (mut forward, mut reverse) = (0.0f64, 0.0f64);
        let mut families = [0usize; 7];
        for i in 0..200 {
            let mut r = rng.split(i as u64);
            let cone = family_cone(i % 7, i / 7, &mut r);
            let (s, f, u) = sample_perturbation(&cone, &mut r)?;
            let t = LinearMap::rank_one(s, f, u);
            forward = forward.max(inverse_residual(&t, &cone, &mut r, 100)?);
            reverse = reverse.max(reverse_residual(&t, &cone, &mut r, 100)?);
            families[i % 7] += 1;
        }
        sec.check_eq("configurations", 200, families.iter().sum::<usize>());
        sec.check_le("max |T^-1(T(x)) - x| / (1 + |x|)", forward, 1e-9);
        sec.check_le("max |T(T^-1(y)) - y| / (1 + |y|)", reverse, 1e-9);
        Ok(())
    })
}

/// Ten validated operators per family, each checked on 10⁴ cone samples.
pub fn positivity(seed: u64) -> Section {
    timed("selftest positivity", |sec| {
        let rng = RngStream::new(seed).split_named("positivity");
        for family in 0..7 {
            let (mut positive, mut worst) = (0, f64::INFINITY);
            let mut label = String::new();
            for k in 0..10 {
                let mut r = rng.split((family * 10 + k) as u64);
                let cone = family_cone(family, k, &mut r);
                if label.is_empty() {
                    label = cone.family().to_string();
                }
                let (s, f, u) = sample_perturbation(&cone, &mut r)?;
                let (t, _) = rank_one_perturb(&s, &f, &u, &cone, &mut r)?;
                let check = is_positive_map(&t, &cone, &mut r, 10_000, 1e-9)?;
                positive += check.positive as usize;
                worst = worst.min(check.worst_margin);
            }
            sec.check_eq(format!("{label}: operators positive on 10^4 samples"), 10, positive);
            sec.note(format!("{label}: worst sampled image margin {}", num(worst)));
        }
        Ok(())
    })
}

/// The cone sizes of the witness coverage run.
pub fn witness_cones() -> Vec<ConeSpec> {
    let mut cones = Vec::new();
    cones.extend((2..=6).map(|n| ConeSpec::Orthant { n }));
    cones.extend((1..=5).map(|d| ConeSpec::Lorentz { d }));
    cones.extend((2..=4).map(|n| ConeSpec::Psd { n }));
    cones.extend((2..=3).map(|n| ConeSpec::Copositive { n }));
    cones.extend((5..=9).map(grid_cone));
    cones
}

/// 25 seeded runs per cone size: interior `u`, random automorphism `S` and
/// random `f ∈ K′`; every run must produce a verified witness within 10⁴ attempts.
pub fn witness_coverage(seed: u64) -> Section {
    timed("selftest witness-coverage", |sec| {
        let rng = RngStream::new(seed).split_named("witness-coverage");
        for (ci, cone) in witness_cones().iter().enumerate() {
            let (mut found, mut attempts) = (0, 0);
            for run in 0..25u64 {
                let mut r = rng.split(ci as u64 * 1000 + run);
                let u = sample_point(cone, Region::Interior, &mut r)?;
                let s = sample_automorphism(cone, &mut r);
                let f = sample_dual(cone, &mut r);
                let t = LinearMap::rank_one(s, f, u);
                let w = nonpositive_inverse_witness(&t, cone, &mut r, 10_000)?;
                let verified = w.found
                    && w.is_sound(&t, cone)
                    && w.y_margin.is_some_and(|m| m >= -1e-9)
                    && w.x_margin.is_some_and(|m| m < -1e-6);
                found += verified as usize;
                attempts = attempts.max(w.attempts);
            }
            sec.check_eq(format!("{cone}: verified witnesses in 25 runs"), 25, found);
            sec.note(format!("{cone}: at most {attempts} attempts"));
        }
        Ok(())
    })
}

/// `f(u) = 0` data where `T₁` already fails to have a positive inverse.
pub fn scaling(seed: u64) -> Section {
    timed("selftest scaling", |sec| {
        let rng = RngStream::new(seed).split_named("scaling");
        let cases = [
            (
                ConeSpec::Orthant { n: 3 },
                Functional::covector(vec![0.0, 1.0, 0.0]),
                Point::coords(vec![1.0, 0.0, 0.0]),
            ),
            (
                ConeSpec::Psd { n: 2 },
                Functional::TraceForm { b: SymMat::diag(&[0.0, 1.0]) },
                Point::matrix(SymMat::diag(&[1.0, 0.0])),
            ),
        ];
        for (i, (cone, f, u)) in cases.iter().enumerate() {
            let s = LinearMap::Identity;
            let (n, w) = smallest_scaling_n(&s, f, u, cone, &mut rng.split(i as u64), 100)?;
            let t = scaled_family(&s, f, u, n);
            sec.check_eq(format!("{cone}: smallest N"), 1, n);
            sec.check_true(format!("{cone}: witness verified for T_N"), w.found && w.is_sound(&t, cone));
        }
        Ok(())
    })
}

/// Analytic crossings plus the sandwich invariant on random segments.
pub fn bisection(seed: u64) -> Section {
    timed("selftest bisection", |sec| {
        let tol = BISECTION_TOL;
        let c = |v: &[f64]| Point::coords(v.to_vec());
        let cases = [
            (ConeSpec::Orthant { n: 2 }, c(&[1.0, 1.0]), c(&[2.0, -1.0]), 0.5),
            (ConeSpec::Lorentz { d: 1 }, c(&[0.0, 1.0]), c(&[2.0, 0.0]), 1.0 / 3.0),
            (
                ConeSpec::Psd { n: 2 },
                Point::matrix(SymMat::identity(2)),
                Point::matrix(SymMat::diag(&[1.0, -1.0])),
                0.5,
            ),
        ];
        for (cone, u, v, exact) in &cases {
            let r = boundary_crossing(cone, u, v, tol)?;
            sec.check_close(format!("{cone}: crossing parameter"), r.c, *exact, 1e-6);
        }
        let rng = RngStream::new(seed).split_named("bisection");
        let cones = [
            ConeSpec::Orthant { n: 4 },
            ConeSpec::Lorentz { d: 3 },
            ConeSpec::Psd { n: 3 },
            ConeSpec::Copositive { n: 3 },
            grid_cone(9),
        ];
        for (i, cone) in cones.iter().enumerate() {
            let mut r = rng.split(i as u64);
            let mut held = 0;
            for _ in 0..20 {
                let u = sample_point(cone, Region::Interior, &mut r)?;
                let v = sample_point(cone, Region::Exterior, &mut r)?;
                let res = boundary_crossing(cone, &u, &v, tol)?;
                let dir = v.sub(&u)?;
                let band = res.verdict_tol;
                let before = margin(cone, &u.axpy((res.c - tol).max(0.0), &dir)?)?;
                let after = margin(cone, &u.axpy((res.c + tol).min(1.0), &dir)?)?;
                let ok = before >= -band && after <= band && res.verdict_at_c.class == MembershipClass::Boundary;
                held += ok as usize;
            }
            sec.check_eq(format!("{cone}: sandwich invariant on 20 segments"), 20, held);
        }
        Ok(())
    })
}

/// Exact simplex minimisation against the lattice at resolution 1/200.
pub fn copositivity_oracle(seed: u64) -> Section {
    timed("selftest copositivity-oracle", |sec| {
        let mut rng = RngStream::new(seed).split_named("copositivity-oracle");
        let (mut agree, mut copositive, mut worst_gap) = (0, 0, 0.0f64);
        let mut below = 0;
        for _ in 0..200 {
            let shift = rng.uniform_range(0.0, 1.5);
            let a = SymMat::from_upper(4, |i, j| rng.uniform_range(-1.0, 1.0) + if i == j { shift } else { 0.0 });
            let exact = simplex_quadratic_min(&a)?.value;
            let lattice = simplex_grid_min(&a, 200);
            let (ve, vl) = (exact >= -1e-6, lattice >= -1e-6);
            agree += (ve == vl) as usize;
            copositive += ve as usize;
            below += (lattice >= exact - 1e-12) as usize;
            worst_gap = worst_gap.max(lattice - exact);
        }
        sec.check_eq("verdicts agree on 200 random 4x4 instances", 200, agree);
        sec.check_eq("lattice minimum never below the exact minimum", 200, below);
        sec.note(format!("{copositive} of 200 instances copositive; largest lattice gap {}", num(worst_gap)));
        Ok(())
    })
}

/// Cones the default suite runs the property groups on.
pub fn property_cones() -> Vec<ConeSpec> {
    vec![
        ConeSpec::Orthant { n: 4 },
        ConeSpec::Lorentz { d: 3 },
        ConeSpec::Psd { n: 3 },
        ConeSpec::Copositive { n: 3 },
        ConeSpec::Lexicographic,
        ConeSpec::Ray {
            direction: vec![2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0],
        },
        grid_cone(9),
    ]
}

/// Property groups for every cone of [`property_cones`].
pub fn property_suites(seed: u64) -> Report {
    Report::new(seed, property_cones().iter().flat_map(|c| property_sections(c, seed)).collect())
}

/// Everything: operator checks, property suites and golden scenarios.
pub fn run_selftest(seed: u64) -> Report {
    let checks = vec![
        inverse_exactness(seed),
        positivity(seed),
        witness_coverage(seed),
        scaling(seed),
        bisection(seed),
        copositivity_oracle(seed),
    ];
    Report::new(seed, checks).merge(property_suites(seed)).merge(run_paper_examples(seed))
}
