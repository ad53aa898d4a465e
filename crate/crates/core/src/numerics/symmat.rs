use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real symmetric matrix stored densely in row-major order.
///
/// The upper triangle is authoritative: every constructor mirrors it into the
/// lower triangle, so `get(i, j) == get(j, i)` holds bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SymMat {
    n: usize,
    data: Vec<f64>,
}

impl SymMat {
    pub fn zeros(n: usize) -> Self {
        SymMat {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    pub fn diag(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n);
        for (i, &v) in d.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    /// Build from `f(i, j)` evaluated on the upper triangle only.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    /// Build from explicit rows, rejecting non-square or visibly asymmetric input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::shape("empty matrix"));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::shape("matrix rows must all have length n"));
        }
        let scale = rows
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            for j in i + 1..n {
                if (rows[i][j] - rows[j][i]).abs() > 1e-12 * (1.0 + scale) {
                    return Err(Error::shape(format!(
                        "matrix is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self::from_upper(n, |i, j| rows[i][j]))
    }

    /// `v vᵀ`.
    pub fn outer(v: &[f64]) -> Self {
        Self::from_upper(v.len(), |i, j| v[i] * v[j])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        SymMat {
            n: self.n,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &SymMat, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.n, other.n);
        SymMat {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius inner product `tr(self · other)`.
    pub fn frobenius_dot(&self, other: &SymMat) -> f64 {
        super::dot(&self.data, &other.data)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_dot(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `xᵀ A x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            acc += x[i] * super::dot(row, x);
        }
        acc
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.data.chunks(self.n).map(|r| super::dot(r, x)).collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for SymMat {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        SymMat::from_rows(&rows)
    }
}

impl From<SymMat> for Vec<Vec<f64>> {
    fn from(m: SymMat) -> Self {
        m.rows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_rows_rejects_asymmetric() {
        assert!(SymMat::from_rows(&[vec![1.0, 3.0], vec![2.0, 4.0]]).is_err());
        assert!(SymMat::from_rows(&[vec![1.0, 3.0]]).is_err());
        let m = SymMat::from_rows(&[vec![1.0, 3.0], vec![3.0, 1.0]]).unwrap();
        assert_eq!(m.get(1, 0), 3.0);
    }

    #[test]
    fn quad_form_and_trace() {
        let m = SymMat::diag(&[-0.5, 1.0, 1.0]);
        assert_eq!(m.trace(), 1.5);
        assert_eq!(m.quad_form(&[1.0, 0.0, 0.0]), -0.5);
        assert_eq!(SymMat::identity(3).frobenius_dot(&m), 1.5);
    }
}
