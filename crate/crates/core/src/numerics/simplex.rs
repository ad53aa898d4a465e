use super::{solve_in_place, SymMat};
use crate::error::{Error, Result};

/// Largest dimension accepted by [`simplex_quadratic_min`]; the face
/// enumeration visits `2ⁿ − 1` supports.
pub const MAX_SIMPLEX_DIM: usize = 12;

/// Minimum of `xᵀAx` over the standard simplex and a minimiser.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexMin {
    pub value: f64,
    pub argmin: Vec<f64>,
}

/// Exact minimum of the quadratic form over `{x ≥ 0, Σx = 1}`.
///
/// Every nonempty support `J` is visited: the stationarity system
/// `A_J x_J = λ·1, Σ x_J = 1` is solved by partial-pivot elimination on the
/// matrix scaled to unit max-entry, faces whose pivot drops below `1e-12`
/// are skipped, and nonnegative solutions are kept as candidates alongside
/// all vertices. A skipped singular face loses nothing: the form is constant
/// along its null direction, so its minimum also appears on a smaller face.
pub fn simplex_quadratic_min(a: &SymMat) -> Result<SimplexMin> {
    let n = a.n();
    if n > MAX_SIMPLEX_DIM {
        return Err(Error::DimensionTooLarge {
            n,
            max: MAX_SIMPLEX_DIM,
        });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }

    let mut best_value = f64::INFINITY;
    let mut best = vec![0.0; n];
    for i in 0..n {
        if a.get(i, i) < best_value {
            best_value = a.get(i, i);
            best = vec![0.0; n];
            best[i] = 1.0;
        }
    }
    let scale = a.max_abs();
    if scale == 0.0 {
        return Ok(SimplexMin {
            value: best_value,
            argmin: best,
        });
    }

    let mut support = Vec::with_capacity(n);
    let mut sys = Vec::with_capacity((n + 1) * (n + 1));
    let mut rhs = Vec::with_capacity(n + 1);
    for mask in 1u32..(1u32 << n) {
        if mask.count_ones() < 2 {
            continue;
        }
        support.clear();
        support.extend((0..n).filter(|&i| mask & (1 << i) != 0));
        let k = support.len();
        let m = k + 1;
        sys.clear();
        sys.resize(m * m, 0.0);
        rhs.clear();
        rhs.resize(m, 0.0);
        for (r, &i) in support.iter().enumerate() {
            for (c, &j) in support.iter().enumerate() {
                sys[r * m + c] = a.get(i, j) / scale;
            }
            sys[r * m + k] = -1.0;
            sys[k * m + r] = 1.0;
        }
        rhs[k] = 1.0;
        if solve_in_place(&mut sys, &mut rhs, 1e-12).is_none() {
            continue;
        }
        if rhs[..k].iter().any(|&x| !(x >= -1e-12)) {
            continue;
        }
        let mut x = vec![0.0; n];
        for (r, &i) in support.iter().enumerate() {
            x[i] = rhs[r].max(0.0);
        }
        let s: f64 = x.iter().sum();
        if !(s > 0.0) {
            continue;
        }
        x.iter_mut().for_each(|v| *v /= s);
        let value = a.quad_form(&x);
        if value < best_value {
            best_value = value;
            best = x;
        }
    }
    Ok(SimplexMin {
        value: best_value,
        argmin: best,
    })
}

/// Minimum of `xᵀAx` over the lattice points of the standard simplex with
/// denominator `res`. A brute-force reference for [`simplex_quadratic_min`];
/// its value exceeds the true minimum by `O(res⁻²)`.
pub fn simplex_grid_min(a: &SymMat, res: usize) -> f64 {
    fn rec(a: &SymMat, res: usize, k: usize, left: usize, q: f64, ax: &mut [f64], best: &mut f64) {
        let n = a.n();
        let h = 1.0 / res as f64;
        // Coordinate k takes `j / res` for j in 0..=left; the last one takes the rest.
        let range = if k == n - 1 { left..=left } else { 0..=left };
        for j in range {
            let t = j as f64 * h;
            let qk = q + t * (2.0 * ax[k] + a.get(k, k) * t);
            if k == n - 1 {
                *best = best.min(qk);
                continue;
            }
            for (i, v) in ax.iter_mut().enumerate().skip(k + 1) {
                *v += t * a.get(i, k);
            }
            rec(a, res, k + 1, left - j, qk, ax, best);
            for (i, v) in ax.iter_mut().enumerate().skip(k + 1) {
                *v -= t * a.get(i, k);
            }
        }
    }
    let mut best = f64::INFINITY;
    let mut ax = vec![0.0; a.n()];
    rec(a, res.max(1), 0, res.max(1), 0.0, &mut ax, &mut best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    /// Independent oracle: minimum over the lattice points of the simplex
    /// with denominator `res`.
    fn grid_min(a: &SymMat, res: usize) -> f64 {
        fn rec(a: &SymMat, res: usize, x: &mut Vec<f64>, left: usize, best: &mut f64) {
            let n = a.n();
            if x.len() == n - 1 {
                x.push(left as f64 / res as f64);
                *best = best.min(a.quad_form(x));
                x.pop();
                return;
            }
            for k in 0..=left {
                x.push(k as f64 / res as f64);
                rec(a, res, x, left - k, best);
                x.pop();
            }
        }
        let mut best = f64::INFINITY;
        rec(a, res, &mut Vec::new(), res, &mut best);
        best
    }

    #[test]
    fn lattice_oracles_agree() {
        let mut rng = crate::rng::RngStream::new(17);
        for n in 1..5 {
            for _ in 0..20 {
                let a = SymMat::from_upper(n, |_, _| rng.normal());
                let fast = simplex_grid_min(&a, 30);
                let slow = grid_min(&a, 30);
                assert!((fast - slow).abs() <= 1e-12 * (1.0 + slow.abs()), "{fast} {slow}");
            }
        }
    }

    #[test]
    fn diagonal_with_negative_entry() {
        let r = simplex_quadratic_min(&SymMat::diag(&[-0.5, 1.0])).unwrap();
        assert_eq!(r.value, -0.5);
        assert_eq!(r.argmin, vec![1.0, 0.0]);
    }

    #[test]
    fn identity_minimum_at_barycentre() {
        let r = simplex_quadratic_min(&SymMat::identity(2)).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15);
        assert!((r.argmin[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn off_diagonal_minimum_at_vertex() {
        let a = SymMat::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let r = simplex_quadratic_min(&a).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.argmin.contains(&1.0));
    }

    #[test]
    fn dimension_limit() {
        let a = SymMat::identity(13);
        assert!(matches!(
            simplex_quadratic_min(&a),
            Err(Error::DimensionTooLarge { n: 13, .. })
        ));
        assert!(simplex_quadratic_min(&SymMat::identity(12)).is_ok());
    }

    #[test]
    fn agrees_with_grid_oracle() {
        let mut rng = RngStream::new(99);
        for _ in 0..200 {
            let a = SymMat::from_upper(4, |_, _| rng.normal());
            let r = simplex_quadratic_min(&a).unwrap();
            let g = grid_min(&a, 200);
            // the grid can only overestimate; its error is O(‖A‖/res²)
            assert!(r.value <= g + 1e-12, "face value {} above grid {g}", r.value);
            assert!(g - r.value <= 1e-3, "gap {}", g - r.value);
            let s: f64 = r.argmin.iter().sum();
            assert!((s - 1.0).abs() < 1e-12 && r.argmin.iter().all(|&x| x >= 0.0));
            assert!((a.quad_form(&r.argmin) - r.value).abs() < 1e-10);
        }
    }
}
