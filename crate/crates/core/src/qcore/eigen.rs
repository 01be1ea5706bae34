//! Hermitian eigendecomposition.
//!
//! A Hermitian `H = A + iB` is embedded as the real symmetric matrix
//! `[[A, -B], [B, A]]`, which is diagonalized by cyclic Jacobi rotations.
//! Every eigenvalue of `H` appears twice in the embedding; a complex
//! eigenbasis is recovered from the `2n` real eigenvectors by greedy
//! Gram–Schmidt, always taking the candidate with the largest residual.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;

/// Off-diagonal magnitude below which Jacobi sweeps stop.
pub const JACOBI_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// `vectors[k]` is the eigenvector for `values[k]`.
    pub vectors: Vec<Vec<Complex64>>,
}

impl Eigen {
    /// Rebuilds `Σ f(λ_k) |v_k⟩⟨v_k|`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (lambda, v) in self.values.iter().zip(&self.vectors) {
            let w = f(*lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = v[i] * w;
                for j in 0..n {
                    m[(i, j)] += vi * v[j].conj();
                }
            }
        }
        m
    }

    pub fn max_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// Real symmetric eigendecomposition by cyclic Jacobi. Returns `(values, columns)`
/// where `columns[k]` is the k-th eigenvector.
fn jacobi_symmetric(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    let tol = JACOBI_TOL * scale;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[p * n + q].abs());
            }
        }
        if off < tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < tol * 1e-3 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let values = (0..n).map(|i| a[i * n + i]).collect();
    let columns = (0..n).map(|k| (0..n).map(|i| v[i * n + k]).collect()).collect();
    (values, columns)
}

fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigendecomposition of a Hermitian matrix. Only the Hermitian part of the input is used.
pub fn eigh(h: &ComplexMatrix) -> Eigen {
    assert!(h.is_square(), "eigh needs a square matrix");
    let n = h.rows();
    if n == 0 {
        return Eigen {
            values: vec![],
            vectors: vec![],
        };
    }
    let h = h.hermitian_part();
    let m = 2 * n;
    let mut emb = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            emb[i * m + j] = z.re;
            emb[(i + n) * m + (j + n)] = z.re;
            emb[i * m + (j + n)] = -z.im;
            emb[(i + n) * m + j] = z.im;
        }
    }
    let (_, columns) = jacobi_symmetric(emb, m);
    let mut candidates: Vec<Vec<Complex64>> = columns
        .into_iter()
        .map(|col| (0..n).map(|i| Complex64::new(col[i], col[i + n])).collect())
        .collect();

    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while basis.len() < n {
        for cand in candidates.iter_mut() {
            if let Some(last) = basis.last() {
                let proj = inner(last, cand);
                for (c, b) in cand.iter_mut().zip(last) {
                    *c -= proj * b;
                }
            }
        }
        let (best, best_norm) = candidates
            .iter()
            .enumerate()
            .map(|(k, c)| (k, norm(c)))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        let mut chosen = candidates.swap_remove(best);
        for z in chosen.iter_mut() {
            *z /= best_norm;
        }
        basis.push(chosen);
    }

    let mut pairs: Vec<(f64, Vec<Complex64>)> = basis.into_iter().map(|v| (h.sandwich(&v, &v).re, v)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (values, vectors) = pairs.into_iter().unzip();
    Eigen { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let e = eigh(&ComplexMatrix::diagonal(&[3.0, -1.0, 2.0]));
        assert_eq!(e.values.len(), 3);
        for (got, want) in e.values.iter().zip([-1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn pauli_y_eigenvalues() {
        let y = ComplexMatrix::from_vec(
            2,
            2,
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let e = eigh(&y);
        assert!((e.values[0] + 1.0).abs() < 1e-12);
        assert!((e.values[1] - 1.0).abs() < 1e-12);
        let rebuilt = e.apply(|x| x);
        assert!(rebuilt.max_abs_diff(&y) < 1e-12);
    }

    #[test]
    fn degenerate_spectrum_reconstructs() {
        let m = ComplexMatrix::identity(4).scale(0.25);
        let e = eigh(&m);
        assert!(e.values.iter().all(|v| (v - 0.25).abs() < 1e-14));
        assert!(e.apply(|x| x).max_abs_diff(&m) < 1e-12);
        for i in 0..4 {
            for j in 0..4 {
                let ip = inner(&e.vectors[i], &e.vectors[j]).norm();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-12);
            }
        }
    }
}
