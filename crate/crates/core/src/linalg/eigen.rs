use super::{Matrix, SymMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-14;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// stored as the columns of `basis`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub basis: Matrix,
}

impl EigenDecomposition {
    pub fn eigenvector(&self, i: usize) -> Vec<f64> {
        self.basis.column(i)
    }

    /// `basis · diag(eigenvalues) · basisᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.eigenvalues.len();
        Matrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| self.basis[(i, k)] * self.eigenvalues[k] * self.basis[(j, k)])
                .sum()
        })
    }

    pub fn largest_magnitude(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Cyclic Jacobi eigendecomposition.
///
/// Sweeps over all off-diagonal pairs until the off-diagonal Frobenius norm
/// drops below `1e-14 · ‖M‖_F`. Gives up after 100 sweeps.
pub fn eigendecompose(m: &SymMatrix) -> Result<EigenDecomposition> {
    let n = m.size();
    let mut a = m.as_matrix().clone();
    let mut v = Matrix::identity(n);
    let target = OFF_DIAGONAL_TOL * a.frobenius_norm();

    let mut converged = false;
    for sweep in 0..=MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        if sweep == MAX_SWEEPS {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                // Negligible against both diagonal entries: drop it.
                let g = 100.0 * apq.abs();
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let eigenvalues = order.iter().map(|&i| a[(i, i)]).collect();
    let basis = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(EigenDecomposition { eigenvalues, basis })
}

/// Singular values of a square matrix in ascending order, with the matching
/// right singular vectors as columns.
///
/// One-sided Jacobi on the columns of `M`, so small singular values keep an
/// absolute accuracy of order `eps · σ_max` instead of `√eps · σ_max`.
pub fn singular_decompose(m: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let n = m.cols();
    let rows = m.rows();
    let mut u = m.clone();
    let mut v = Matrix::identity(n);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for k in 0..rows {
                    alpha += u[(k, p)] * u[(k, p)];
                    beta += u[(k, q)] * u[(k, q)];
                    gamma += u[(k, p)] * u[(k, q)];
                }
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                for k in 0..rows {
                    let (a, b) = (u[(k, p)], u[(k, q)]);
                    u[(k, p)] = c * a - s * b;
                    u[(k, q)] = s * a + c * b;
                }
                for k in 0..n {
                    let (a, b) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * a - s * b;
                    v[(k, q)] = s * a + c * b;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }
    let norms: Vec<f64> = (0..n).map(|j| u.column(j).iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[i].total_cmp(&norms[j]));
    let values = order.iter().map(|&i| norms[i]).collect();
    let basis = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok((values, basis))
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}

// A ← Pᵀ A P, V ← V P, with P the Givens rotation in the (p, q) plane.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

pub fn smallest_eigenvalue(m: &SymMatrix) -> Result<f64> {
    Ok(eigendecompose(m)?.eigenvalues[0])
}

/// `λ_min > pd_tol · max(1, |λ_max|)`.
pub fn is_positive_definite(m: &SymMatrix, pd_tol: f64) -> Result<bool> {
    let eig = eigendecompose(m)?;
    Ok(eig.eigenvalues[0] > pd_tol * eig.largest_magnitude().max(1.0))
}
