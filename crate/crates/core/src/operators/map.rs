use std::fmt;

use serde::Serialize;

use super::functional::{write_list, write_rows};
use super::Functional;
use crate::cones::Point;
use crate::error::{Error, Result};
use crate::numerics::{Mat, SymMat};

/// A linear map of an ambient space to itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinearMap {
    Identity,
    /// `(Sx)ᵢ = dᵢ·x_{π(i)}` with `dᵢ > 0`; acts on coordinates and grid node values.
    PermDiag { perm: Vec<usize>, diag: Vec<f64> },
    /// `(x, α) ↦ ρ(Qx, α)` with `Q` orthogonal.
    SpinAuto { q: Mat, rho: f64 },
    /// `A ↦ MAMᵀ`; the inverse factor is stored.
    Congruence { m: Mat, m_inv: Mat },
    /// A general matrix on coordinates. No closed-form inverse.
    Dense { matrix: Mat },
    /// `x ↦ Sx + f(x)u`.
    RankOnePerturbed {
        s: Box<LinearMap>,
        f: Functional,
        u: Point,
    },
}

impl LinearMap {
    pub fn perm_diag(perm: Vec<usize>, diag: Vec<f64>) -> Result<Self> {
        let n = perm.len();
        if diag.len() != n {
            return Err(Error::shape("permutation and diagonal lengths differ"));
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidSpec("not a permutation".into()));
            }
            seen[p] = true;
        }
        if diag.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::InvalidSpec("diagonal entries must be positive".into()));
        }
        Ok(LinearMap::PermDiag { perm, diag })
    }

    pub fn spin_auto(q: Mat, rho: f64) -> Result<Self> {
        let qtq = q.transpose().mul(&q);
        let dev = Mat::identity(q.n()).rows().iter().flatten().zip(qtq.rows().iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if dev > 1e-10 {
            return Err(Error::InvalidSpec(format!("Q is not orthogonal (‖QᵀQ − I‖ = {dev:e})")));
        }
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::InvalidSpec("spin scale must be positive".into()));
        }
        Ok(LinearMap::SpinAuto { q, rho })
    }

    pub fn congruence(m: Mat) -> Result<Self> {
        if m.det().abs() < 1e-9 {
            return Err(Error::Singular);
        }
        let m_inv = m.inverse()?;
        Ok(LinearMap::Congruence { m, m_inv })
    }

    pub fn rank_one(s: LinearMap, f: Functional, u: Point) -> Self {
        LinearMap::RankOnePerturbed { s: Box::new(s), f, u }
    }

    pub fn apply(&self, p: &Point) -> Result<Point> {
        match (self, p) {
            (LinearMap::Identity, _) => Ok(p.clone()),
            (LinearMap::PermDiag { perm, diag }, Point::Coordinates { .. } | Point::GridFunction { .. }) => {
                map_values(p, perm.len(), |x| perm.iter().zip(diag).map(|(&j, d)| d * x[j]).collect())
            }
            (LinearMap::SpinAuto { q, rho }, Point::Coordinates { values }) if values.len() == q.n() + 1 => {
                let d = q.n();
                let mut y: Vec<f64> = q.mul_vec(&values[..d]).iter().map(|v| rho * v).collect();
                y.push(rho * values[d]);
                Ok(Point::coords(y))
            }
            (LinearMap::Congruence { m, .. }, Point::Matrix { matrix }) if matrix.n() == m.n() => {
                Ok(Point::matrix(congruence(m, matrix)))
            }
            (LinearMap::Dense { matrix }, Point::Coordinates { .. } | Point::GridFunction { .. }) => {
                map_values(p, matrix.n(), |x| matrix.mul_vec(x))
            }
            (LinearMap::RankOnePerturbed { s, f, u }, _) => s.apply(p)?.axpy(f.eval(p)?, u),
            _ => Err(Error::shape(format!("{} cannot act on {}", self.kind(), p.shape_name()))),
        }
    }

    /// Closed-form inverse. A rank-one perturbation is inverted by
    /// `x = S⁻¹y − λS⁻¹u` with `λ = f(S⁻¹y)/(1 + f(S⁻¹u))`.
    pub fn apply_inverse(&self, y: &Point) -> Result<Point> {
        match (self, y) {
            (LinearMap::Identity, _) => Ok(y.clone()),
            (LinearMap::PermDiag { perm, diag }, Point::Coordinates { .. } | Point::GridFunction { .. }) => {
                map_values(y, perm.len(), |v| {
                    let mut x = vec![0.0; v.len()];
                    for (i, (&j, d)) in perm.iter().zip(diag).enumerate() {
                        x[j] = v[i] / d;
                    }
                    x
                })
            }
            (LinearMap::SpinAuto { q, rho }, Point::Coordinates { values }) if values.len() == q.n() + 1 => {
                let d = q.n();
                let mut x: Vec<f64> = q.tmul_vec(&values[..d]).iter().map(|v| v / rho).collect();
                x.push(values[d] / rho);
                Ok(Point::coords(x))
            }
            (LinearMap::Congruence { m_inv, .. }, Point::Matrix { matrix }) if matrix.n() == m_inv.n() => {
                Ok(Point::matrix(congruence(m_inv, matrix)))
            }
            (LinearMap::Dense { .. }, _) => Err(Error::unsupported("dense maps have no closed-form inverse")),
            (LinearMap::RankOnePerturbed { s, f, u }, _) => {
                let a = s.apply_inverse(y)?;
                let b = s.apply_inverse(u)?;
                let denom = 1.0 + f.eval(&b)?;
                if denom == 0.0 || !denom.is_finite() {
                    return Err(Error::Singular);
                }
                let lambda = f.eval(&a)? / denom;
                a.axpy(-lambda, &b)
            }
            _ => Err(Error::shape(format!("{} cannot act on {}", self.kind(), y.shape_name()))),
        }
    }

    /// The inverse as a map of the same kind, where one exists in closed form.
    pub fn inverse(&self) -> Result<LinearMap> {
        Ok(match self {
            LinearMap::Identity => LinearMap::Identity,
            LinearMap::PermDiag { perm, diag } => {
                let n = perm.len();
                let mut inv_perm = vec![0; n];
                let mut inv_diag = vec![0.0; n];
                for (i, &j) in perm.iter().enumerate() {
                    inv_perm[j] = i;
                    inv_diag[j] = 1.0 / diag[i];
                }
                LinearMap::PermDiag {
                    perm: inv_perm,
                    diag: inv_diag,
                }
            }
            LinearMap::SpinAuto { q, rho } => LinearMap::SpinAuto {
                q: q.transpose(),
                rho: 1.0 / rho,
            },
            LinearMap::Congruence { m, m_inv } => LinearMap::Congruence {
                m: m_inv.clone(),
                m_inv: m.clone(),
            },
            LinearMap::Dense { .. } => return Err(Error::unsupported("dense maps have no closed-form inverse")),
            LinearMap::RankOnePerturbed { s, f, u } => {
                let s_inv = s.inverse()?;
                let b = s.apply_inverse(u)?;
                let denom = 1.0 + f.eval(&b)?;
                if denom == 0.0 || !denom.is_finite() {
                    return Err(Error::Singular);
                }
                LinearMap::rank_one(s_inv.clone(), super::pullback(f, &s_inv).scaled(-1.0 / denom), b)
            }
        })
    }

    pub fn has_closed_form_inverse(&self) -> bool {
        match self {
            LinearMap::Dense { .. } => false,
            LinearMap::RankOnePerturbed { s, .. } => s.has_closed_form_inverse(),
            _ => true,
        }
    }

    pub(crate) fn kind(&self) -> &'static str {
        match self {
            LinearMap::Identity => "identity",
            LinearMap::PermDiag { .. } => "permutation-diagonal map",
            LinearMap::SpinAuto { .. } => "spin automorphism",
            LinearMap::Congruence { .. } => "congruence",
            LinearMap::Dense { .. } => "dense map",
            LinearMap::RankOnePerturbed { .. } => "rank-one perturbation",
        }
    }
}

fn map_values(p: &Point, n: usize, f: impl FnOnce(&[f64]) -> Vec<f64>) -> Result<Point> {
    let values = match p {
        Point::Coordinates { values } | Point::GridFunction { values, .. } => values,
        Point::Matrix { .. } => unreachable!("callers pass vector points"),
    };
    if values.len() != n {
        return Err(Error::shape(format!("map of size {n} applied to {}", p.shape_name())));
    }
    let out = f(values);
    Ok(match p {
        Point::GridFunction { grid, .. } => Point::GridFunction {
            grid: grid.clone(),
            values: out,
        },
        _ => Point::coords(out),
    })
}

/// `MAMᵀ`.
pub(crate) fn congruence(m: &Mat, a: &SymMat) -> SymMat {
    let n = m.n();
    let ma = Mat::from_fn(n, |i, j| (0..n).map(|k| m.get(i, k) * a.get(k, j)).sum());
    SymMat::from_upper(n, |i, j| (0..n).map(|k| ma.get(i, k) * m.get(j, k)).sum())
}

impl fmt::Display for LinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinearMap::Identity => write!(f, "identity"),
            LinearMap::PermDiag { perm, diag } => {
                write!(f, "permdiag:(")?;
                for (i, p) in perm.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", p + 1)?;
                }
                write!(f, "):(")?;
                for (i, d) in diag.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{d}")?;
                }
                write!(f, ")")
            }
            LinearMap::SpinAuto { q, rho } => {
                write!(f, "spin:")?;
                write_rows(f, &q.rows())?;
                write!(f, ":{rho}")
            }
            LinearMap::Congruence { m, .. } => {
                write!(f, "congruence:")?;
                write_rows(f, &m.rows())
            }
            LinearMap::Dense { matrix } => {
                write!(f, "dense:")?;
                write_rows(f, &matrix.rows())
            }
            LinearMap::RankOnePerturbed { s, f: g, u } => {
                write!(f, "rankone({s}; {g}; ")?;
                match u {
                    Point::Matrix { matrix } => {
                        write!(f, "point:")?;
                        write_rows(f, &matrix.rows())?;
                    }
                    Point::Coordinates { values } | Point::GridFunction { values, .. } => {
                        write!(f, "point:")?;
                        write_list(f, values)?;
                    }
                }
                write!(f, ")")
            }
        }
    }
}
