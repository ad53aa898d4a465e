use std::fmt;

use serde::Serialize;

use super::LinearMap;
use crate::cones::{Grid, Point};
use crate::error::{Error, Result};
use crate::numerics::{dot, sym_eig, SymMat};

/// A linear functional on one of the ambient spaces.
///
/// The structured variants are the positive functionals of the concrete cone
/// families; `Combination` and `Composed` close the set under nonnegative
/// combinations and pullbacks.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Functional {
    /// `x ↦ ⟨c, x⟩` on coordinates or on grid node values.
    DenseCovector { values: Vec<f64> },
    /// `(x, α) ↦ scale·(α + ⟨x, x̂⟩)`; positive on the Lorentz cone when `‖x̂‖ ≤ 1`.
    SpinDual { xhat: Vec<f64>, scale: f64 },
    /// `A ↦ tr(BA)`; positive on the PSD cone when `B ⪰ 0`.
    TraceForm { b: SymMat },
    /// `A ↦ Σ vᵢᵀAvᵢ`; positive on the copositive cone when every `vᵢ ≥ 0`.
    CpForm { vectors: Vec<Vec<f64>> },
    /// Trapezoid rule, exact for piecewise-linear functions on the grid.
    TrapezoidIntegral { grid: Grid },
    PointEvaluation { grid: Grid, node: usize },
    /// `(x, y) ↦ x`.
    LexFirstCoord,
    Combination { terms: Vec<Term> },
    /// `p ↦ outer(map(p))`, the unstructured pullback.
    Composed { outer: Box<Functional>, map: Box<LinearMap> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term {
    pub weight: f64,
    pub functional: Functional,
}

impl Functional {
    pub fn covector(values: Vec<f64>) -> Self {
        Functional::DenseCovector { values }
    }

    pub fn spin_dual(xhat: Vec<f64>) -> Self {
        Functional::SpinDual { xhat, scale: 1.0 }
    }

    /// Weighted sum; zero weights are dropped and a lone unit term collapses.
    pub fn combination(terms: Vec<(f64, Functional)>) -> Self {
        let mut terms: Vec<Term> = terms
            .into_iter()
            .filter(|(w, _)| *w != 0.0)
            .map(|(weight, functional)| Term { weight, functional })
            .collect();
        if terms.len() == 1 && terms[0].weight == 1.0 {
            return terms.pop().unwrap().functional;
        }
        Functional::Combination { terms }
    }

    pub fn eval(&self, p: &Point) -> Result<f64> {
        let mismatch = || Error::shape(format!("{} cannot evaluate {}", self.kind(), p.shape_name()));
        match (self, p) {
            (Functional::DenseCovector { values: c }, Point::Coordinates { values })
            | (Functional::DenseCovector { values: c }, Point::GridFunction { values, .. })
                if c.len() == values.len() =>
            {
                Ok(dot(c, values))
            }
            (Functional::SpinDual { xhat, scale }, Point::Coordinates { values })
                if values.len() == xhat.len() + 1 =>
            {
                let d = xhat.len();
                Ok(scale * (values[d] + dot(&values[..d], xhat)))
            }
            (Functional::TraceForm { b }, Point::Matrix { matrix }) if b.n() == matrix.n() => {
                Ok(b.frobenius_dot(matrix))
            }
            (Functional::CpForm { vectors }, Point::Matrix { matrix })
                if vectors.iter().all(|v| v.len() == matrix.n()) =>
            {
                Ok(vectors.iter().map(|v| matrix.quad_form(v)).sum())
            }
            (Functional::TrapezoidIntegral { grid }, Point::GridFunction { grid: g, values }) if grid == g => {
                Ok(dot(&grid.trapezoid_weights(), values))
            }
            (Functional::PointEvaluation { grid, node }, Point::GridFunction { grid: g, values })
                if grid == g && *node < values.len() =>
            {
                Ok(values[*node])
            }
            (Functional::LexFirstCoord, Point::Coordinates { values }) if values.len() == 2 => Ok(values[0]),
            (Functional::Combination { terms }, _) => {
                let mut total = 0.0;
                for t in terms {
                    total += t.weight * t.functional.eval(p)?;
                }
                Ok(total)
            }
            (Functional::Composed { outer, map }, _) => outer.eval(&map.apply(p)?),
            _ => Err(mismatch()),
        }
    }

    /// `c·f`. Structured forms are kept where the family is closed under the
    /// scaling (`CpForm` only for `c ≥ 0`).
    pub fn scaled(&self, c: f64) -> Functional {
        match self {
            Functional::DenseCovector { values } => Functional::covector(values.iter().map(|v| c * v).collect()),
            Functional::SpinDual { xhat, scale } => Functional::SpinDual {
                xhat: xhat.clone(),
                scale: scale * c,
            },
            Functional::TraceForm { b } => Functional::TraceForm { b: b.scale(c) },
            Functional::CpForm { vectors } if c >= 0.0 => {
                let r = c.sqrt();
                Functional::CpForm {
                    vectors: vectors.iter().map(|v| v.iter().map(|x| r * x).collect()).collect(),
                }
            }
            Functional::Combination { terms } => Functional::Combination {
                terms: terms
                    .iter()
                    .map(|t| Term {
                        weight: t.weight * c,
                        functional: t.functional.clone(),
                    })
                    .collect(),
            },
            Functional::Composed { outer, map } => Functional::Composed {
                outer: Box::new(outer.scaled(c)),
                map: map.clone(),
            },
            _ => Functional::combination(vec![(c, self.clone())]),
        }
    }

    /// Whether the stored parameters are not all zero.
    pub fn is_nonzero(&self) -> bool {
        match self {
            Functional::DenseCovector { values } => values.iter().any(|&v| v != 0.0),
            Functional::SpinDual { scale, .. } => *scale != 0.0,
            Functional::TraceForm { b } => b.max_abs() > 0.0,
            Functional::CpForm { vectors } => vectors.iter().flatten().any(|&v| v != 0.0),
            Functional::TrapezoidIntegral { .. } | Functional::PointEvaluation { .. } | Functional::LexFirstCoord => true,
            Functional::Combination { terms } => terms.iter().any(|t| t.weight != 0.0 && t.functional.is_nonzero()),
            Functional::Composed { outer, .. } => outer.is_nonzero(),
        }
    }

    /// Checks the parameter constraints that make each structured variant
    /// positive on its own cone family (`‖x̂‖ ≤ 1`, `B ⪰ 0`, `vᵢ ≥ 0`,
    /// nonnegative combination weights).
    pub fn check_parameters(&self) -> Result<()> {
        let bad = |m: String| Err(Error::NotPositiveFunctional(m));
        match self {
            Functional::SpinDual { xhat, scale } => {
                if crate::numerics::norm2(xhat) > 1.0 + 1e-12 || *scale < 0.0 {
                    return bad("spin dual needs ‖x̂‖ ≤ 1 and a nonnegative scale".into());
                }
            }
            Functional::TraceForm { b } => {
                let m = sym_eig(b)?.min();
                if m < -1e-10 {
                    return bad(format!("trace form matrix has eigenvalue {m}"));
                }
            }
            Functional::CpForm { vectors } => {
                if vectors.iter().flatten().any(|&v| v < -1e-12) {
                    return bad("completely positive form needs nonnegative vectors".into());
                }
            }
            Functional::Combination { terms } => {
                for t in terms {
                    if t.weight < 0.0 {
                        return bad("combination weights must be nonnegative".into());
                    }
                    t.functional.check_parameters()?;
                }
            }
            Functional::PointEvaluation { grid, node } if *node >= grid.len() => {
                return Err(Error::shape(format!("node {node} outside a grid of {} nodes", grid.len())));
            }
            _ => {}
        }
        Ok(())
    }

    /// Whether the functional has a textual form (everything except pullbacks
    /// that left the structured families).
    pub fn is_structured(&self) -> bool {
        match self {
            Functional::Composed { .. } => false,
            Functional::Combination { terms } => terms.iter().all(|t| t.functional.is_structured()),
            _ => true,
        }
    }

    pub(crate) fn kind(&self) -> &'static str {
        match self {
            Functional::DenseCovector { .. } => "covector",
            Functional::SpinDual { .. } => "spin dual",
            Functional::TraceForm { .. } => "trace form",
            Functional::CpForm { .. } => "completely positive form",
            Functional::TrapezoidIntegral { .. } => "trapezoid integral",
            Functional::PointEvaluation { .. } => "point evaluation",
            Functional::LexFirstCoord => "first coordinate",
            Functional::Combination { .. } => "combination",
            Functional::Composed { .. } => "composed functional",
        }
    }

    /// Nodal weight vector of a functional on grid functions over `grid`, when
    /// it is a combination of grid functionals and covectors.
    pub(crate) fn grid_weights(&self, grid: &Grid) -> Option<Vec<f64>> {
        match self {
            Functional::DenseCovector { values } if values.len() == grid.len() => Some(values.clone()),
            Functional::TrapezoidIntegral { grid: g } if g == grid => Some(grid.trapezoid_weights()),
            Functional::PointEvaluation { grid: g, node } if g == grid && *node < grid.len() => {
                let mut w = vec![0.0; grid.len()];
                w[*node] = 1.0;
                Some(w)
            }
            Functional::Combination { terms } => {
                let mut w = vec![0.0; grid.len()];
                for t in terms {
                    for (a, b) in w.iter_mut().zip(t.functional.grid_weights(grid)?) {
                        *a += t.weight * b;
                    }
                }
                Some(w)
            }
            _ => None,
        }
    }
}

pub(crate) fn write_list(f: &mut fmt::Formatter<'_>, v: &[f64]) -> fmt::Result {
    write!(f, "[")?;
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{x}")?;
    }
    write!(f, "]")
}

pub(crate) fn write_rows(f: &mut fmt::Formatter<'_>, rows: &[Vec<f64>]) -> fmt::Result {
    write!(f, "[")?;
    for (i, r) in rows.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write_list(f, r)?;
    }
    write!(f, "]")
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Functional::DenseCovector { values } => {
                write!(f, "covector:")?;
                write_list(f, values)
            }
            Functional::SpinDual { xhat, scale } => {
                if *scale != 1.0 {
                    write!(f, "{scale}*")?;
                }
                write!(f, "spindual:")?;
                write_list(f, xhat)
            }
            Functional::TraceForm { b } => {
                if *b == SymMat::identity(b.n()) {
                    write!(f, "trace")
                } else {
                    write!(f, "trace:")?;
                    write_rows(f, &b.rows())
                }
            }
            Functional::CpForm { vectors } => {
                write!(f, "cp:")?;
                write_rows(f, vectors)
            }
            Functional::TrapezoidIntegral { .. } => write!(f, "integral"),
            Functional::PointEvaluation { node, .. } => write!(f, "eval@{node}"),
            Functional::LexFirstCoord => write!(f, "lexfirst"),
            Functional::Combination { terms } => {
                if terms.is_empty() {
                    return write!(f, "zero");
                }
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    if let Functional::Combination { .. } = t.functional {
                        write!(f, "{}*({})", t.weight, t.functional)?;
                    } else {
                        write!(f, "{}*{}", t.weight, t.functional)?;
                    }
                }
                Ok(())
            }
            Functional::Composed { outer, map } => write!(f, "pullback({outer}; {map})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_of_piecewise_function_is_one() {
        let grid = Grid::linspace(0.0, 1.0, 5).unwrap();
        let x = Point::grid_function(grid.clone(), vec![0.0, 5.0, 0.0, -1.0, 0.0]).unwrap();
        assert_eq!(Functional::TrapezoidIntegral { grid }.eval(&x).unwrap(), 1.0);
    }

    #[test]
    fn spin_dual_at_its_own_direction() {
        let f = Functional::spin_dual(vec![0.6, 0.8]);
        assert_eq!(f.eval(&Point::coords(vec![0.6, 0.8, 0.0])).unwrap(), 1.0);
    }

    #[test]
    fn trace_of_diagonal() {
        let f = Functional::TraceForm { b: SymMat::identity(3) };
        let d = Point::matrix(SymMat::diag(&[-0.5, 1.0, 1.0]));
        assert_eq!(f.eval(&d).unwrap(), 1.5);
    }

    #[test]
    fn covector_example_and_shape_errors() {
        let f = Functional::covector(vec![1.0, 1.0]);
        assert_eq!(f.eval(&Point::coords(vec![1.0, 2.0])).unwrap(), 3.0);
        assert!(matches!(
            f.eval(&Point::coords(vec![1.0])),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(Functional::LexFirstCoord.eval(&Point::matrix(SymMat::identity(2))).is_err());
    }

    #[test]
    fn scaling_preserves_values() {
        let p = Point::matrix(SymMat::from_rows(&[vec![1.0, -2.0], vec![-2.0, 3.0]]).unwrap());
        for f in [
            Functional::CpForm {
                vectors: vec![vec![1.0, 2.0], vec![0.5, 0.0]],
            },
            Functional::TraceForm {
                b: SymMat::diag(&[1.0, 2.0]),
            },
        ] {
            let base = f.eval(&p).unwrap();
            for c in [0.0, 0.1, 3.0] {
                let v = f.scaled(c).eval(&p).unwrap();
                assert!((v - c * base).abs() <= 1e-12 * (1.0 + base.abs() * c));
            }
        }
        let lex = Functional::LexFirstCoord.scaled(2.0);
        assert_eq!(lex.eval(&Point::coords(vec![3.0, -1.0])).unwrap(), 6.0);
    }

    #[test]
    fn parameter_checks() {
        assert!(Functional::spin_dual(vec![0.6, 0.8]).check_parameters().is_ok());
        assert!(Functional::spin_dual(vec![1.0, 1.0]).check_parameters().is_err());
        assert!(Functional::TraceForm {
            b: SymMat::diag(&[1.0, -1.0])
        }
        .check_parameters()
        .is_err());
        assert!(Functional::CpForm {
            vectors: vec![vec![1.0, -0.5]]
        }
        .check_parameters()
        .is_err());
    }

    #[test]
    fn display_forms() {
        assert_eq!(Functional::covector(vec![1.0, 0.0, 2.0]).to_string(), "covector:[1,0,2]");
        assert_eq!(Functional::spin_dual(vec![0.6, 0.8]).to_string(), "spindual:[0.6,0.8]");
        assert_eq!(Functional::TraceForm { b: SymMat::identity(3) }.to_string(), "trace");
        let grid = Grid::linspace(0.0, 1.0, 3).unwrap();
        assert_eq!(Functional::PointEvaluation { grid, node: 0 }.to_string(), "eval@0");
        assert_eq!(
            Functional::LexFirstCoord.scaled(2.0).to_string(),
            "2*lexfirst"
        );
    }
}
