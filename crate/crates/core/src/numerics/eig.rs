use super::SymMat;
use crate::error::{Error, Result};

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver.
///
/// Sweeps over all `(p, q)` pairs until the off-diagonal Frobenius norm drops
/// below `1e-14 · ‖A‖_F`, or 100 sweeps have run.
pub fn sym_eig(a: &SymMat) -> Result<Spectrum> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.n();
    let mut m: Vec<f64> = a.data().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let threshold = 1e-14 * a.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k * n + p], m[k * n + q]);
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p * n + k], m[q * n + k]);
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    Ok(Spectrum {
        values: order.iter().map(|&i| m[i * n + i]).collect(),
        vectors: order
            .iter()
            .map(|&j| (0..n).map(|k| v[k * n + j]).collect())
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn random_sym(rng: &mut RngStream, n: usize) -> SymMat {
        SymMat::from_upper(n, |_, _| rng.normal())
    }

    fn residuals(a: &SymMat, s: &Spectrum) -> (f64, f64) {
        let n = a.n();
        let mut rec = 0.0f64;
        let mut orth = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let r: f64 = (0..n)
                    .map(|k| s.vectors[k][i] * s.values[k] * s.vectors[k][j])
                    .sum();
                rec = rec.max((r - a.get(i, j)).abs());
                let o: f64 = (0..n).map(|k| s.vectors[i][k] * s.vectors[j][k]).sum();
                let e = if i == j { 1.0 } else { 0.0 };
                orth = orth.max((o - e).abs());
            }
        }
        (rec, orth)
    }

    #[test]
    fn identity_and_diagonal() {
        assert_eq!(sym_eig(&SymMat::identity(2)).unwrap().values, vec![1.0, 1.0]);
        let s = sym_eig(&SymMat::diag(&[1.0, -0.5, 1.0])).unwrap();
        assert_eq!(s.values, vec![-0.5, 1.0, 1.0]);
    }

    #[test]
    fn two_by_two_characteristic_roots() {
        // λ² − 2λ − 8 = 0
        let a = SymMat::from_rows(&[vec![1.0, 3.0], vec![3.0, 1.0]]).unwrap();
        let s = sym_eig(&a).unwrap();
        assert!((s.values[0] + 2.0).abs() < 1e-14);
        assert!((s.values[1] - 4.0).abs() < 1e-14);
        let v = &s.vectors[0];
        assert!((v[0] + v[1]).abs() < 1e-14);
    }

    #[test]
    fn non_finite_rejected() {
        let a = SymMat::diag(&[1.0, f64::NAN]);
        assert_eq!(sym_eig(&a), Err(Error::NonFinite));
    }

    #[test]
    fn reconstruction_on_random_matrices() {
        let mut rng = RngStream::new(2024);
        for trial in 0..500 {
            let n = 1 + trial % 8;
            let a = random_sym(&mut rng, n);
            let s = sym_eig(&a).unwrap();
            let (rec, orth) = residuals(&a, &s);
            let scale = 1.0 + a.max_abs() * n as f64;
            assert!(rec <= 1e-10 * scale, "reconstruction {rec} at n={n}");
            assert!(orth <= 1e-10, "orthogonality {orth}");
            assert!(s.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn shift_moves_every_eigenvalue() {
        let mut rng = RngStream::new(5);
        for _ in 0..100 {
            let n = 2 + rng.index(6);
            let a = random_sym(&mut rng, n);
            let c = 3.0 * rng.normal();
            let shifted = SymMat::from_upper(n, |i, j| a.get(i, j) + if i == j { c } else { 0.0 });
            let s0 = sym_eig(&a).unwrap();
            let s1 = sym_eig(&shifted).unwrap();
            for (x, y) in s0.values.iter().zip(&s1.values) {
                assert!((x + c - y).abs() < 1e-10);
            }
        }
    }
}
