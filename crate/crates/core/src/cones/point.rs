use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::SymMat;

/// Strictly increasing node set `t₀ < … < t_m` of a piecewise-linear grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Grid(Arc<[f64]>);

impl Grid {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidSpec("a grid needs at least two nodes".into()));
        }
        if nodes.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidSpec("grid nodes must be finite".into()));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidSpec("grid nodes must be strictly increasing".into()));
        }
        Ok(Grid(nodes.into()))
    }

    /// `n` equally spaced nodes from `a` to `b`.
    pub fn linspace(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSpec("a grid needs at least two nodes".into()));
        }
        let h = (b - a) / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
        nodes[n - 1] = b;
        Self::new(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Trapezoid weights; exact for integrating piecewise-linear functions.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let t = self.nodes();
        let m = t.len() - 1;
        (0..=m)
            .map(|i| match i {
                0 => (t[1] - t[0]) / 2.0,
                _ if i == m => (t[m] - t[m - 1]) / 2.0,
                _ => (t[i + 1] - t[i - 1]) / 2.0,
            })
            .collect()
    }

    /// Whether the node set is symmetric about its midpoint.
    pub fn is_symmetric(&self) -> bool {
        let t = self.nodes();
        let (a, b) = (t[0], t[t.len() - 1]);
        let tol = 1e-12 * (1.0 + a.abs().max(b.abs()));
        t.iter()
            .zip(t.iter().rev())
            .all(|(x, y)| ((x - a) - (b - y)).abs() <= tol)
    }

    /// Insert `k − 1` equally spaced nodes inside every cell.
    pub fn refine(&self, k: usize) -> Grid {
        let t = self.nodes();
        let mut out = Vec::with_capacity((t.len() - 1) * k + 1);
        for w in t.windows(2) {
            for j in 0..k {
                out.push(w[0] + (w[1] - w[0]) * j as f64 / k as f64);
            }
        }
        out.push(t[t.len() - 1]);
        Grid(out.into())
    }

    /// Piecewise-linear interpolation of node values at `s` (clamped to the grid).
    pub fn interpolate(&self, values: &[f64], s: f64) -> f64 {
        let t = self.nodes();
        if s <= t[0] {
            return values[0];
        }
        let m = t.len() - 1;
        if s >= t[m] {
            return values[m];
        }
        let i = t.partition_point(|&x| x <= s) - 1;
        let w = (s - t[i]) / (t[i + 1] - t[i]);
        values[i] * (1.0 - w) + values[i + 1] * w
    }
}

impl TryFrom<Vec<f64>> for Grid {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Grid::new(v)
    }
}

impl From<Grid> for Vec<f64> {
    fn from(g: Grid) -> Self {
        g.0.to_vec()
    }
}

/// An element of one of the three ambient spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Point {
    Coordinates { values: Vec<f64> },
    Matrix { matrix: SymMat },
    GridFunction { grid: Grid, values: Vec<f64> },
}

impl Point {
    pub fn coords(values: Vec<f64>) -> Self {
        Point::Coordinates { values }
    }

    pub fn matrix(matrix: SymMat) -> Self {
        Point::Matrix { matrix }
    }

    pub fn grid_function(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::shape(format!(
                "grid has {} nodes but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        Ok(Point::GridFunction { grid, values })
    }

    /// Standard unit vector `e_i` in an `n`-dimensional coordinate space.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Point::coords(v)
    }

    /// Flat view of the stored reals (matrices row-major, full storage).
    pub fn raw(&self) -> &[f64] {
        match self {
            Point::Coordinates { values } | Point::GridFunction { values, .. } => values,
            Point::Matrix { matrix } => matrix.data(),
        }
    }

    pub fn as_coords(&self) -> Option<&[f64]> {
        match self {
            Point::Coordinates { values } => Some(values),
            _ => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&SymMat> {
        match self {
            Point::Matrix { matrix } => Some(matrix),
            _ => None,
        }
    }

    pub fn as_grid_values(&self) -> Option<(&Grid, &[f64])> {
        match self {
            Point::GridFunction { grid, values } => Some((grid, values)),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.raw().iter().all(|v| v.is_finite())
    }

    /// Same variant and same dimension (and same grid for grid functions).
    pub fn same_shape(&self, other: &Point) -> bool {
        match (self, other) {
            (Point::Coordinates { values: a }, Point::Coordinates { values: b }) => a.len() == b.len(),
            (Point::Matrix { matrix: a }, Point::Matrix { matrix: b }) => a.n() == b.n(),
            (Point::GridFunction { grid: g, .. }, Point::GridFunction { grid: h, .. }) => g == h,
            _ => false,
        }
    }

    fn check_shape(&self, other: &Point) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::shape(format!(
                "{} vs {}",
                self.shape_name(),
                other.shape_name()
            )))
        }
    }

    pub fn shape_name(&self) -> String {
        match self {
            Point::Coordinates { values } => format!("coordinates[{}]", values.len()),
            Point::Matrix { matrix } => format!("matrix[{}x{}]", matrix.n(), matrix.n()),
            Point::GridFunction { grid, .. } => format!("grid[{}]", grid.len()),
        }
    }

    /// Apply `f` entrywise to a pair of same-shape points.
    pub fn zip_with(&self, other: &Point, f: impl Fn(f64, f64) -> f64) -> Result<Point> {
        self.check_shape(other)?;
        Ok(match (self, other) {
            (Point::Coordinates { values: a }, Point::Coordinates { values: b }) => {
                Point::coords(a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
            }
            (Point::Matrix { matrix: a }, Point::Matrix { matrix: b }) => {
                Point::matrix(a.zip_map(b, f))
            }
            (Point::GridFunction { grid, values: a }, Point::GridFunction { values: b, .. }) => {
                Point::GridFunction {
                    grid: grid.clone(),
                    values: a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect(),
                }
            }
            _ => unreachable!(),
        })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Point {
        match self {
            Point::Coordinates { values } => Point::coords(values.iter().map(|&x| f(x)).collect()),
            Point::Matrix { matrix } => Point::matrix(matrix.map(f)),
            Point::GridFunction { grid, values } => Point::GridFunction {
                grid: grid.clone(),
                values: values.iter().map(|&x| f(x)).collect(),
            },
        }
    }

    pub fn add(&self, other: &Point) -> Result<Point> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Point) -> Result<Point> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Point {
        self.map(|x| c * x)
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: f64, other: &Point) -> Result<Point> {
        self.zip_with(other, |a, b| a + c * b)
    }

    pub fn neg(&self) -> Point {
        self.map(|x| -x)
    }

    pub fn zeros_like(&self) -> Point {
        self.map(|_| 0.0)
    }

    /// Euclidean inner product (Frobenius for matrices, nodewise for grids).
    pub fn inner(&self, other: &Point) -> Result<f64> {
        self.check_shape(other)?;
        Ok(crate::numerics::dot(self.raw(), other.raw()))
    }

    pub fn norm(&self) -> f64 {
        crate::numerics::norm2(self.raw())
    }

    pub fn norm_inf(&self) -> f64 {
        self.raw().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn norm_l1(&self) -> f64 {
        self.raw().iter().map(|v| v.abs()).sum()
    }

    /// `‖self − other‖∞`.
    pub fn dist_inf(&self, other: &Point) -> Result<f64> {
        Ok(self.sub(other)?.norm_inf())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, v: &[f64]) -> fmt::Result {
            write!(f, "[")?;
            for (i, x) in v.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")
        }
        write!(f, "point:")?;
        match self {
            Point::Coordinates { values } | Point::GridFunction { values, .. } => list(f, values),
            Point::Matrix { matrix } => {
                write!(f, "[")?;
                for (i, row) in matrix.rows().iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    list(f, row)?;
                }
                write!(f, "]")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(Grid::new(vec![0.0]).is_err());
        assert!(Grid::new(vec![0.0, 0.0]).is_err());
        assert!(Grid::new(vec![0.0, 1.0, 0.5]).is_err());
        assert!(Grid::linspace(-2.0, 2.0, 9).unwrap().is_symmetric());
        assert!(!Grid::new(vec![0.0, 0.1, 1.0]).unwrap().is_symmetric());
    }

    #[test]
    fn trapezoid_weights_on_quarter_grid() {
        let g = Grid::new(vec![0.0, 0.25, 0.5, 0.75, 1.0]).unwrap();
        assert_eq!(g.trapezoid_weights(), vec![0.125, 0.25, 0.25, 0.25, 0.125]);
    }

    #[test]
    fn refine_and_interpolate() {
        let g = Grid::new(vec![0.0, 1.0, 3.0]).unwrap();
        let r = g.refine(2);
        assert_eq!(r.nodes(), &[0.0, 0.5, 1.0, 2.0, 3.0]);
        assert_eq!(g.interpolate(&[0.0, 2.0, 0.0], 2.0), 1.0);
        assert_eq!(g.interpolate(&[0.0, 2.0, 0.0], 5.0), 0.0);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let a = Point::coords(vec![1.0, 2.0]);
        let b = Point::coords(vec![1.0]);
        assert!(matches!(a.add(&b), Err(Error::ShapeMismatch(_))));
        let m = Point::matrix(SymMat::identity(2));
        assert!(a.inner(&m).is_err());
    }
}
