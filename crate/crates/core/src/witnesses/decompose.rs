use serde::Serialize;

use crate::error::{Error, Result};

/// Grid for the numerical confirmation: `dᵢ ∈ {0.01, 0.02, …, 10}`.
const GRID_STEPS: usize = 1000;
const GRID_STEP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Permutation {
    Identity,
    Swap,
}

/// `M = PD + uvᵀ` with `D` positive diagonal and `u, v ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Factorization {
    pub permutation: Permutation,
    pub d: [f64; 2],
    pub u: [f64; 2],
    pub v: [f64; 2],
    /// `max |PD + uvᵀ − M|`.
    pub reconstruction_error: f64,
}

/// The product condition for one permutation.
///
/// For `P = I` the residue's diagonal products satisfy
/// `(u₁v₁)(u₂v₂) = (u₁v₂)(u₂v₁) = M₁₂M₂₁` with `uᵢvᵢ < Mᵢᵢ`, so a
/// decomposition exists iff `M₁₂M₂₁ < M₁₁M₂₂`. For the swap the roles of
/// the diagonal and off-diagonal entries exchange.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseAnalysis {
    pub permutation: Permutation,
    /// Product the rank-one residue must reproduce.
    pub required_product: f64,
    /// Strict upper bound the same product must stay below.
    pub bound: f64,
    pub feasible: bool,
}

/// Minimum over the `(d₁, d₂)` grid of `σ₂(N) + ‖N₋‖∞`, `N = M − PD`; zero
/// exactly when `N` is a nonnegative rank-one matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSearch {
    pub permutation: Permutation,
    pub min_residual: f64,
    pub argmin: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition2x2 {
    pub cases: [CaseAnalysis; 2],
    /// A decomposition for the first feasible case, if any.
    pub factorization: Option<Factorization>,
    pub grid: [GridSearch; 2],
}

impl Decomposition2x2 {
    pub fn feasible(&self) -> bool {
        self.factorization.is_some()
    }

    /// Smallest grid residual over both permutations.
    pub fn grid_min_residual(&self) -> f64 {
        self.grid[0].min_residual.min(self.grid[1].min_residual)
    }
}

/// Decide whether a nonnegative invertible `2 × 2` matrix is a
/// permutation-diagonal matrix plus a nonnegative rank-one matrix.
pub fn decompose_2x2(m: [[f64; 2]; 2]) -> Result<Decomposition2x2> {
    let entries = [m[0][0], m[0][1], m[1][0], m[1][1]];
    if entries.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    if entries.iter().any(|&v| v < 0.0) {
        return Err(Error::NotNonnegative);
    }
    let scale = entries.iter().fold(0.0f64, |a, &b| a.max(b));
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.abs() <= 1e-12 * scale * scale {
        return Err(Error::Singular);
    }
    let diag_product = m[0][0] * m[1][1];
    let off_product = m[0][1] * m[1][0];
    let cases = [
        CaseAnalysis {
            permutation: Permutation::Identity,
            required_product: off_product,
            bound: diag_product,
            feasible: off_product < diag_product,
        },
        CaseAnalysis {
            permutation: Permutation::Swap,
            required_product: diag_product,
            bound: off_product,
            feasible: diag_product < off_product,
        },
    ];
    let factorization = cases.iter().find(|c| c.feasible).map(|c| factor(m, c.permutation));
    let grid = [grid_search(m, Permutation::Identity), grid_search(m, Permutation::Swap)];
    Ok(Decomposition2x2 {
        cases,
        factorization,
        grid,
    })
}

/// Positions of the entries `PD` occupies: `(row, col)` for `d₁` and `d₂`.
fn pd_positions(p: Permutation) -> [(usize, usize); 2] {
    match p {
        Permutation::Identity => [(0, 0), (1, 1)],
        Permutation::Swap => [(1, 0), (0, 1)],
    }
}

fn factor(m: [[f64; 2]; 2], p: Permutation) -> Factorization {
    let [(r1, c1), (r2, c2)] = pd_positions(p);
    let (m1, m2) = (m[r1][c1], m[r2][c2]);
    let (prod, bound) = (m[r1 ^ 1][c1] * m[r2 ^ 1][c2], m1 * m2);
    // a·b = prod with a < m1 and b < m2.
    let r = prod / bound;
    let a = m1 * (1.0 + r) / 2.0;
    let b = prod / a;
    let d = [m1 - a, m2 - b];
    let mut n = m;
    n[r1][c1] = a;
    n[r2][c2] = b;
    let (u, v) = rank_one_factor(n);
    let mut err: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let pd = if (i, j) == (r1, c1) {
                d[0]
            } else if (i, j) == (r2, c2) {
                d[1]
            } else {
                0.0
            };
            err = err.max((pd + u[i] * v[j] - m[i][j]).abs());
        }
    }
    Factorization {
        permutation: p,
        d,
        u,
        v,
        reconstruction_error: err,
    }
}

/// Nonnegative `u, v` with `uvᵀ = n` for a nonnegative rank-one `n`.
fn rank_one_factor(n: [[f64; 2]; 2]) -> ([f64; 2], [f64; 2]) {
    let (mut bi, mut bj) = (0, 0);
    for i in 0..2 {
        for j in 0..2 {
            if n[i][j] > n[bi][bj] {
                (bi, bj) = (i, j);
            }
        }
    }
    let pivot = n[bi][bj];
    if pivot == 0.0 {
        return ([0.0; 2], [0.0; 2]);
    }
    ([n[0][bj], n[1][bj]], [n[bi][0] / pivot, n[bi][1] / pivot])
}

fn rank_one_gap(n: [[f64; 2]; 2]) -> f64 {
    let fro2: f64 = n.iter().flatten().map(|v| v * v).sum();
    let det = n[0][0] * n[1][1] - n[0][1] * n[1][0];
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
    let sigma2 = ((fro2 - disc) / 2.0).max(0.0).sqrt();
    let neg = n.iter().flatten().fold(0.0f64, |a, &v| a.max(-v));
    sigma2 + neg
}

fn grid_search(m: [[f64; 2]; 2], p: Permutation) -> GridSearch {
    let [(r1, c1), (r2, c2)] = pd_positions(p);
    let mut best = GridSearch {
        permutation: p,
        min_residual: f64::INFINITY,
        argmin: [0.0; 2],
    };
    for i in 1..=GRID_STEPS {
        let d1 = i as f64 * GRID_STEP;
        for j in 1..=GRID_STEPS {
            let d2 = j as f64 * GRID_STEP;
            let mut n = m;
            n[r1][c1] -= d1;
            n[r2][c2] -= d2;
            let g = rank_one_gap(n);
            if g < best.min_residual {
                best.min_residual = g;
                best.argmin = [d1, d2];
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn identity_case_of_the_reference_matrix_is_infeasible() {
        let r = decompose_2x2([[1.0, 3.0], [2.0, 4.0]]).unwrap();
        assert_eq!(r.cases[0].required_product, 6.0);
        assert_eq!(r.cases[0].bound, 4.0);
        assert!(!r.cases[0].feasible);
        assert!(r.grid[0].min_residual > 0.05);
    }

    #[test]
    fn swap_case_of_the_reference_matrix_factors() {
        let r = decompose_2x2([[1.0, 3.0], [2.0, 4.0]]).unwrap();
        assert_eq!((r.cases[1].required_product, r.cases[1].bound), (4.0, 6.0));
        assert!(r.cases[1].feasible);
        let f = r.factorization.unwrap();
        assert_eq!(f.permutation, Permutation::Swap);
        assert!(f.d.iter().all(|&d| d > 0.0) && f.u.iter().chain(&f.v).all(|&x| x >= 0.0));
        assert!(f.reconstruction_error < 1e-12);
        assert!(r.grid[1].min_residual < 1e-9);
        // An independent decomposition: swap·diag(0.4, 0.5) + (1, 1.6)(1, 2.5)ᵀ.
        let (d, u, v): ([f64; 2], [f64; 2], [f64; 2]) = ([0.4, 0.5], [1.0, 1.6], [1.0, 2.5]);
        let m = [[u[0] * v[0], d[1] + u[0] * v[1]], [d[0] + u[1] * v[0], u[1] * v[1]]];
        let expect = [[1.0f64, 3.0], [2.0, 4.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((m[i][j] - expect[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn feasible_examples() {
        let r = decompose_2x2([[2.0, 2.0], [1.0, 3.0]]).unwrap();
        let f = r.factorization.unwrap();
        assert_eq!(f.permutation, Permutation::Identity);
        assert!(f.reconstruction_error < 1e-12 && f.d.iter().all(|&d| d > 0.0));
        // The decomposition is not unique; D = I, u = (1, 1), v = (1, 2) is another.
        assert!(r.grid[0].min_residual < 1e-9);

        let r = decompose_2x2([[2.0, 0.0], [0.0, 1.0]]).unwrap();
        let f = r.factorization.unwrap();
        assert_eq!((f.permutation, f.d, f.u, f.v), (Permutation::Identity, [1.0, 1.0], [1.0, 0.0], [1.0, 0.0]));
    }

    #[test]
    fn errors() {
        assert_eq!(decompose_2x2([[1.0, -1.0], [0.0, 1.0]]), Err(Error::NotNonnegative));
        assert_eq!(decompose_2x2([[1.0, 2.0], [2.0, 4.0]]), Err(Error::Singular));
    }

    #[test]
    fn round_trip_on_constructed_matrices() {
        let mut rng = RngStream::new(9);
        for _ in 0..100 {
            let swap = rng.coin();
            let d = [rng.uniform_range(0.1, 3.0), rng.uniform_range(0.1, 3.0)];
            let u = [rng.uniform_range(0.0, 2.0), rng.uniform_range(0.0, 2.0)];
            let v = [rng.uniform_range(0.0, 2.0), rng.uniform_range(0.0, 2.0)];
            let mut m = [[u[0] * v[0], u[0] * v[1]], [u[1] * v[0], u[1] * v[1]]];
            if swap {
                m[1][0] += d[0];
                m[0][1] += d[1];
            } else {
                m[0][0] += d[0];
                m[1][1] += d[1];
            }
            let r = decompose_2x2(m).unwrap();
            let f = r.factorization.expect("constructed matrices decompose");
            assert!(f.reconstruction_error <= 1e-9);
            assert!(f.d.iter().all(|&x| x > 0.0) && f.u.iter().chain(&f.v).all(|&x| x >= 0.0));
        }
    }
}
