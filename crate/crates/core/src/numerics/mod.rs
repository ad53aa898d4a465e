//! Small dense linear algebra: symmetric matrices, a cyclic Jacobi
//! eigensolver and the quadratic-over-simplex oracle used for copositivity.

mod dense;
mod eig;
mod simplex;
mod symmat;

pub use dense::{solve_in_place, Mat};
pub use eig::{sym_eig, Spectrum};
pub use simplex::{simplex_grid_min, simplex_quadratic_min, SimplexMin, MAX_SIMPLEX_DIM};
pub use symmat::SymMat;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
