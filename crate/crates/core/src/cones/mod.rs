//! Concrete cone families: membership margins, classification, the induced
//! order, sampling, dual functionals and extremal structure.
//!
//! Every family reduces membership to a single signed scalar, the *margin*,
//! which is positively homogeneous of degree one:
//!
//! | family        | margin                                   |
//! |---------------|------------------------------------------|
//! | `Orthant`     | `min_i x_i`                              |
//! | `Lorentz`     | `α − ‖x‖₂` (last coordinate is `α`)      |
//! | `Psd`         | smallest eigenvalue                      |
//! | `Copositive`  | `min xᵀAx` over the standard simplex     |
//! | `GridNonneg`  | smallest node value                      |
//! | `Ray`         | `⟨p, d̂⟩` on the ray, `−‖off-ray part‖` off it |
//! | `Lexicographic` | `1`, `0` or `−max(|x|,|y|)` by exact sign rules |

mod dual;
mod extremal;
mod point;
mod sample;

use std::fmt;

use serde::{Serialize, Serializer};

pub use dual::{dual_min_on_samples, dual_zero_pair, sample_dual, separating_functional, supporting_functional, Separation};
pub use extremal::{find_incomparable, is_extremal, sample_extremal, sample_non_extremal};
pub use point::{Grid, Point};
pub use sample::{sample_ambient, sample_point};

use crate::error::{Error, Result};
use crate::numerics::{simplex_quadratic_min, sym_eig, SymMat, MAX_SIMPLEX_DIM};

/// Default membership tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Off-ray component norm below which a point counts as lying on a ray cone.
pub const RAY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum ConeSpec {
    /// `ℝⁿ₊`.
    Orthant { n: usize },
    /// `{(x, α) ∈ ℝᵈ × ℝ : α ≥ ‖x‖}`; points are `d + 1` coordinates, `α` last.
    Lorentz { d: usize },
    /// Positive semidefinite `n × n` matrices.
    Psd { n: usize },
    /// Copositive `n × n` matrices, `n ≤ 12`.
    Copositive { n: usize },
    /// `{(x, y) : x > 0, or x = 0 and y ≥ 0}` in `ℝ²`. Not closed.
    Lexicographic,
    /// `{λ d̂ : λ ≥ 0}` for a unit vector `d̂`.
    Ray { direction: Vec<f64> },
    /// Nodewise nonnegative piecewise-linear functions on a grid.
    GridNonneg { grid: Grid },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MembershipClass {
    Interior,
    Boundary,
    Exterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MembershipVerdict {
    pub class: MembershipClass,
    pub margin: f64,
}

impl MembershipVerdict {
    pub fn in_cone(&self) -> bool {
        self.class != MembershipClass::Exterior
    }
}

/// Where [`sample_point`] should draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Anywhere in the cone (interior and boundary mixed).
    Cone,
    Interior,
    Boundary,
    Exterior,
}

impl ConeSpec {
    pub fn ray(direction: Vec<f64>) -> Result<Self> {
        let c = ConeSpec::Ray { direction };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(m.to_string()));
        match self {
            ConeSpec::Orthant { n } | ConeSpec::Psd { n } | ConeSpec::Lorentz { d: n } if *n == 0 => {
                bad("dimension must be positive")
            }
            ConeSpec::Copositive { n } if *n == 0 || *n > MAX_SIMPLEX_DIM => {
                bad("copositive dimension must be in 1..=12")
            }
            ConeSpec::Ray { direction } => {
                if direction.is_empty() || direction.iter().any(|v| !v.is_finite()) {
                    return bad("ray direction must be a nonempty finite vector");
                }
                let norm = crate::numerics::norm2(direction);
                if (norm - 1.0).abs() > 1e-12 {
                    return bad("ray direction must have unit norm");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Short family name used in reports.
    pub fn family(&self) -> &'static str {
        match self {
            ConeSpec::Orthant { .. } => "orthant",
            ConeSpec::Lorentz { .. } => "lorentz",
            ConeSpec::Psd { .. } => "psd",
            ConeSpec::Copositive { .. } => "copositive",
            ConeSpec::Lexicographic => "lex",
            ConeSpec::Ray { .. } => "ray",
            ConeSpec::GridNonneg { .. } => "grid",
        }
    }

    /// Real dimension of the ambient space.
    pub fn ambient_dim(&self) -> usize {
        match self {
            ConeSpec::Orthant { n } => *n,
            ConeSpec::Lorentz { d } => d + 1,
            ConeSpec::Psd { n } | ConeSpec::Copositive { n } => n * (n + 1) / 2,
            ConeSpec::Lexicographic => 2,
            ConeSpec::Ray { direction } => direction.len(),
            ConeSpec::GridNonneg { grid } => grid.len(),
        }
    }

    pub fn is_closed(&self) -> bool {
        !matches!(self, ConeSpec::Lexicographic)
    }

    pub fn has_interior(&self) -> bool {
        match self {
            ConeSpec::Ray { direction } => direction.len() == 1,
            _ => true,
        }
    }

    /// Length of the coordinate vector for coordinate-shaped cones.
    fn coord_len(&self) -> Option<usize> {
        match self {
            ConeSpec::Orthant { n } => Some(*n),
            ConeSpec::Lorentz { d } => Some(d + 1),
            ConeSpec::Lexicographic => Some(2),
            ConeSpec::Ray { direction } => Some(direction.len()),
            _ => None,
        }
    }

    pub fn matrix_dim(&self) -> Option<usize> {
        match self {
            ConeSpec::Psd { n } | ConeSpec::Copositive { n } => Some(*n),
            _ => None,
        }
    }

    pub fn grid(&self) -> Option<&Grid> {
        match self {
            ConeSpec::GridNonneg { grid } => Some(grid),
            _ => None,
        }
    }

    /// Whether `p` lives in this cone's ambient space.
    pub fn accepts(&self, p: &Point) -> bool {
        match (self, p) {
            (ConeSpec::GridNonneg { grid }, Point::GridFunction { grid: g, .. }) => grid == g,
            (_, Point::Matrix { matrix }) => self.matrix_dim() == Some(matrix.n()),
            (_, Point::Coordinates { values }) => self.coord_len() == Some(values.len()),
            _ => false,
        }
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        if self.accepts(p) {
            Ok(())
        } else {
            Err(Error::shape(format!("{} does not live in {self}", p.shape_name())))
        }
    }

    /// Build a point of this ambient space from a flat list of reals
    /// (row-major full storage for matrices, symmetrised from the upper triangle).
    pub fn point_from_raw(&self, raw: Vec<f64>) -> Result<Point> {
        if let Some(n) = self.coord_len() {
            if raw.len() != n {
                return Err(Error::shape(format!("expected {n} coordinates, got {}", raw.len())));
            }
            return Ok(Point::coords(raw));
        }
        if let Some(n) = self.matrix_dim() {
            if raw.len() != n * n {
                return Err(Error::shape(format!("expected {} matrix entries, got {}", n * n, raw.len())));
            }
            return Ok(Point::matrix(SymMat::from_upper(n, |i, j| raw[i * n + j])));
        }
        let grid = self.grid().expect("grid cone").clone();
        Point::grid_function(grid, raw)
    }

    pub fn zero(&self) -> Point {
        match self {
            ConeSpec::Psd { n } | ConeSpec::Copositive { n } => Point::matrix(SymMat::zeros(*n)),
            ConeSpec::GridNonneg { grid } => Point::GridFunction {
                grid: grid.clone(),
                values: vec![0.0; grid.len()],
            },
            _ => Point::coords(vec![0.0; self.coord_len().unwrap()]),
        }
    }

    /// Canonical interior point (an order unit), when the interior is nonempty.
    pub fn order_unit(&self) -> Option<Point> {
        Some(match self {
            ConeSpec::Orthant { n } => Point::coords(vec![1.0; *n]),
            ConeSpec::Lorentz { d } => Point::unit(d + 1, *d),
            ConeSpec::Psd { n } | ConeSpec::Copositive { n } => Point::matrix(SymMat::identity(*n)),
            ConeSpec::Lexicographic => Point::coords(vec![1.0, 0.0]),
            ConeSpec::GridNonneg { grid } => Point::GridFunction {
                grid: grid.clone(),
                values: vec![1.0; grid.len()],
            },
            ConeSpec::Ray { direction } if direction.len() == 1 => Point::coords(direction.clone()),
            ConeSpec::Ray { .. } => return None,
        })
    }

    /// Deterministic nonzero boundary points that generate the cone (or, for
    /// the copositive cone, a few simple boundary points).
    pub fn canonical_generators(&self) -> Vec<Point> {
        match self {
            ConeSpec::Orthant { n } => (0..*n).map(|i| Point::unit(*n, i)).collect(),
            ConeSpec::GridNonneg { grid } => (0..grid.len())
                .map(|i| {
                    let mut v = vec![0.0; grid.len()];
                    v[i] = 1.0;
                    Point::GridFunction {
                        grid: grid.clone(),
                        values: v,
                    }
                })
                .collect(),
            ConeSpec::Lorentz { d } => (0..*d)
                .flat_map(|i| {
                    [1.0, -1.0].map(|s| {
                        let mut v = vec![0.0; d + 1];
                        v[i] = s;
                        v[*d] = 1.0;
                        Point::coords(v)
                    })
                })
                .collect(),
            ConeSpec::Psd { n } | ConeSpec::Copositive { n } => (0..*n)
                .map(|i| {
                    let mut e = vec![0.0; *n];
                    e[i] = 1.0;
                    Point::matrix(SymMat::outer(&e))
                })
                .collect(),
            ConeSpec::Lexicographic => vec![Point::coords(vec![0.0, 1.0])],
            ConeSpec::Ray { direction } => vec![Point::coords(direction.clone())],
        }
    }
}

/// Signed membership surrogate; `≥ 0` exactly on the cone (up to rounding).
pub fn margin(cone: &ConeSpec, p: &Point) -> Result<f64> {
    cone.check_point(p)?;
    Ok(match (cone, p) {
        (ConeSpec::Orthant { .. }, Point::Coordinates { values })
        | (ConeSpec::GridNonneg { .. }, Point::GridFunction { values, .. }) => {
            values.iter().copied().fold(f64::INFINITY, f64::min)
        }
        (ConeSpec::Lorentz { d }, Point::Coordinates { values }) => {
            values[*d] - crate::numerics::norm2(&values[..*d])
        }
        (ConeSpec::Psd { .. }, Point::Matrix { matrix }) => sym_eig(matrix)?.min(),
        (ConeSpec::Copositive { .. }, Point::Matrix { matrix }) => simplex_quadratic_min(matrix)?.value,
        (ConeSpec::Lexicographic, Point::Coordinates { values }) => {
            let (x, y) = (values[0], values[1]);
            if x > 0.0 {
                1.0
            } else if x == 0.0 && y >= 0.0 {
                0.0
            } else {
                -x.abs().max(y.abs())
            }
        }
        (ConeSpec::Ray { direction }, Point::Coordinates { values }) => {
            let along = crate::numerics::dot(values, direction);
            let off = values
                .iter()
                .zip(direction)
                .map(|(v, d)| (v - along * d).powi(2))
                .sum::<f64>()
                .sqrt();
            if off <= RAY_TOL {
                along
            } else {
                -off
            }
        }
        _ => unreachable!("shape checked above"),
    })
}

/// Classify `p` as interior, boundary or exterior using the margin band `tol`.
///
/// The lexicographic cone uses exact sign tests. A ray cone in dimension
/// two or more has empty interior, so its members are always `Boundary`.
pub fn classify(cone: &ConeSpec, p: &Point, tol: f64) -> Result<MembershipVerdict> {
    let m = margin(cone, p)?;
    let class = match cone {
        ConeSpec::Lexicographic => match m {
            m if m > 0.0 => MembershipClass::Interior,
            m if m == 0.0 => MembershipClass::Boundary,
            _ => MembershipClass::Exterior,
        },
        ConeSpec::Ray { .. } if !cone.has_interior() => {
            if m >= -tol {
                MembershipClass::Boundary
            } else {
                MembershipClass::Exterior
            }
        }
        _ => {
            if m > tol {
                MembershipClass::Interior
            } else if m >= -tol {
                MembershipClass::Boundary
            } else {
                MembershipClass::Exterior
            }
        }
    };
    Ok(MembershipVerdict { class, margin: m })
}

/// `x ≤ y` in the cone order, i.e. `y − x ∈ K` up to `tol`.
pub fn leq(cone: &ConeSpec, x: &Point, y: &Point, tol: f64) -> Result<bool> {
    cone.check_point(x)?;
    let diff = y.sub(x)?;
    Ok(classify(cone, &diff, tol)?.in_cone())
}

impl fmt::Display for ConeSpec {
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
        match self {
            ConeSpec::Orthant { n } => write!(f, "orthant:{n}"),
            ConeSpec::Lorentz { d } => write!(f, "lorentz:{d}"),
            ConeSpec::Psd { n } => write!(f, "psd:{n}"),
            ConeSpec::Copositive { n } => write!(f, "copositive:{n}"),
            ConeSpec::Lexicographic => write!(f, "lex"),
            ConeSpec::Ray { direction } => {
                write!(f, "ray:{}:", direction.len())?;
                list(f, direction)
            }
            ConeSpec::GridNonneg { grid } => {
                write!(f, "grid:")?;
                list(f, grid.nodes())
            }
        }
    }
}

impl Serialize for ConeSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: &[f64]) -> Point {
        Point::coords(v.to_vec())
    }

    #[test]
    fn margins_from_definitions() {
        assert_eq!(margin(&ConeSpec::Orthant { n: 3 }, &c(&[1.0, -2.0, 3.0])).unwrap(), -2.0);
        assert_eq!(margin(&ConeSpec::Lorentz { d: 2 }, &c(&[3.0, 4.0, 5.0])).unwrap(), 0.0);
        let d = Point::matrix(SymMat::diag(&[-0.5, 1.0]));
        assert_eq!(margin(&ConeSpec::Copositive { n: 2 }, &d).unwrap(), -0.5);
        assert_eq!(margin(&ConeSpec::Psd { n: 2 }, &d).unwrap(), -0.5);
    }

    #[test]
    fn classification_examples() {
        let v = classify(&ConeSpec::Orthant { n: 2 }, &c(&[1.0, 1.0]), 1e-9).unwrap();
        assert_eq!((v.class, v.margin), (MembershipClass::Interior, 1.0));
        let v = classify(&ConeSpec::Lorentz { d: 2 }, &c(&[3.0, 4.0, 5.0]), 1e-9).unwrap();
        assert_eq!(v.class, MembershipClass::Boundary);
        let a = Point::matrix(SymMat::from_rows(&[vec![1.0, 3.0], vec![3.0, 1.0]]).unwrap());
        let v = classify(&ConeSpec::Psd { n: 2 }, &a, 1e-9).unwrap();
        assert_eq!(v.class, MembershipClass::Exterior);
        assert!((v.margin + 2.0).abs() < 1e-14);
    }

    #[test]
    fn lexicographic_rules_are_exact() {
        let lex = ConeSpec::Lexicographic;
        assert_eq!(classify(&lex, &c(&[1e-300, -5.0]), 1e-9).unwrap().class, MembershipClass::Interior);
        assert_eq!(classify(&lex, &c(&[0.0, 0.0]), 1e-9).unwrap().class, MembershipClass::Boundary);
        assert_eq!(classify(&lex, &c(&[0.0, -1e-300]), 1e-9).unwrap().class, MembershipClass::Exterior);
        assert_eq!(margin(&lex, &c(&[-2.0, 3.0])).unwrap(), -3.0);
    }

    #[test]
    fn order_comparisons() {
        let o = ConeSpec::Orthant { n: 2 };
        assert!(leq(&o, &c(&[1.0, 2.0]), &c(&[2.0, 3.0]), 1e-9).unwrap());
        assert!(!leq(&o, &c(&[1.0, 2.0]), &c(&[2.0, 1.0]), 1e-9).unwrap());
        assert!(leq(&ConeSpec::Lexicographic, &c(&[0.0, -5.0]), &c(&[1.0, -100.0]), 1e-9).unwrap());
        assert!(leq(&o, &c(&[1.0]), &c(&[1.0, 2.0]), 1e-9).is_err());
    }

    #[test]
    fn ray_margin_and_class() {
        let ray = ConeSpec::ray(vec![1.0, 0.0, 0.0]).unwrap();
        let v = classify(&ray, &c(&[2.0, 0.0, 0.0]), 1e-9).unwrap();
        assert_eq!((v.class, v.margin), (MembershipClass::Boundary, 2.0));
        assert_eq!(margin(&ray, &c(&[1.0, 3.0, 4.0])).unwrap(), -5.0);
        assert_eq!(margin(&ray, &c(&[-1.0, 0.0, 0.0])).unwrap(), -1.0);
        assert!(ConeSpec::ray(vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(ConeSpec::Copositive { n: 13 }.validate().is_err());
        assert!(ConeSpec::Orthant { n: 0 }.validate().is_err());
        assert!(ConeSpec::Lorentz { d: 0 }.validate().is_err());
        assert!(ConeSpec::Psd { n: 3 }.validate().is_ok());
    }

    #[test]
    fn display_forms() {
        assert_eq!(ConeSpec::Orthant { n: 4 }.to_string(), "orthant:4");
        assert_eq!(ConeSpec::ray(vec![1.0, 0.0, 0.0]).unwrap().to_string(), "ray:3:[1,0,0]");
        let g = Grid::new(vec![0.0, 0.25, 0.5, 0.75, 1.0]).unwrap();
        assert_eq!(ConeSpec::GridNonneg { grid: g }.to_string(), "grid:[0,0.25,0.5,0.75,1]");
    }
}
