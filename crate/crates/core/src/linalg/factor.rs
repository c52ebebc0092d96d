use super::{eigen, Matrix, SymMatrix, DEFAULT_PD_TOL};
use crate::error::{Error, Result};

/// Plain Cholesky factorization `M = L Lᵀ`.
///
/// Fails at the first pivot that is not strictly positive. No tolerance is
/// applied; use [`cholesky_with_tolerance`] for the PD decision.
pub fn cholesky_factor(m: &SymMatrix) -> Result<Matrix> {
    let n = m.size();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let d = m[(j, j)] - (0..j).map(|k| l[(j, k)] * l[(j, k)]).sum::<f64>();
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j });
        }
        let ljj = d.sqrt();
        l[(j, j)] = ljj;
        for i in j + 1..n {
            let s = m[(i, j)] - (0..j).map(|k| l[(i, k)] * l[(j, k)]).sum::<f64>();
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Cholesky factor with the eigenvalue-based PD margin.
///
/// Succeeds iff the factorization goes through and
/// `λ_min > pd_tol · max(1, |λ_max|)`. When the pivots are all positive but
/// the margin test fails, the reported pivot is the smallest one.
pub fn cholesky_with_tolerance(m: &SymMatrix, pd_tol: f64) -> Result<Matrix> {
    let l = cholesky_factor(m)?;
    if !eigen::is_positive_definite(m, pd_tol)? {
        let n = m.size();
        let pivot = (0..n)
            .min_by(|&a, &b| l[(a, a)].total_cmp(&l[(b, b)]))
            .unwrap_or(0);
        return Err(Error::NotPositiveDefinite { pivot });
    }
    Ok(l)
}

pub fn cholesky(m: &SymMatrix) -> Result<Matrix> {
    cholesky_with_tolerance(m, DEFAULT_PD_TOL)
}

/// Solves `L x = b` for lower-triangular `L`.
pub fn solve_lower(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    let mut x = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[(i, k)] * x[k]).sum();
        x[i] = (b[i] - s) / l[(i, i)];
    }
    x
}

/// Solves `U x = b` for upper-triangular `U`.
pub fn solve_upper(u: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = u.rows();
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| u[(i, k)] * x[k]).sum();
        x[i] = (b[i] - s) / u[(i, i)];
    }
    x
}

/// `M⁻¹` from the Cholesky factor of `M`, symmetrized.
pub fn inverse_from_cholesky(l: &Matrix) -> SymMatrix {
    let n = l.rows();
    let lt = l.transpose();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let y = solve_lower(l, &e);
        cols.push(solve_upper(&lt, &y));
    }
    SymMatrix::from_upper(n, |i, j| 0.5 * (cols[j][i] + cols[i][j]))
}

/// Inverse of a general square matrix by Gauss-Jordan elimination with
/// partial pivoting.
pub fn inverse(m: &Matrix) -> Result<Matrix> {
    assert!(m.is_square(), "inverse of a non-square matrix");
    let n = m.rows();
    let mut a = m.clone();
    let mut inv = Matrix::identity(n);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs()))
            .unwrap_or(col);
        let pivot = a[(pivot_row, col)];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::Singular);
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap((col, k), (pivot_row, k));
                inv.swap((col, k), (pivot_row, k));
            }
        }
        for k in 0..n {
            a[(col, k)] /= pivot;
            inv[(col, k)] /= pivot;
        }
        for i in (0..n).filter(|&i| i != col) {
            let factor = a[(i, col)];
            if factor == 0.0 {
                continue;
            }
            for k in 0..n {
                a[(i, k)] -= factor * a[(col, k)];
                inv[(i, k)] -= factor * inv[(col, k)];
            }
        }
    }
    Ok(inv)
}

/// Determinant by LU decomposition with partial pivoting.
pub fn determinant(m: &Matrix) -> f64 {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows();
    let mut a = m.clone();
    let mut det = 1.0;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs()))
            .unwrap_or(col);
        let pivot = a[(pivot_row, col)];
        if pivot == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            for k in 0..n {
                let tmp = a[(col, k)];
                a[(col, k)] = a[(pivot_row, k)];
                a[(pivot_row, k)] = tmp;
            }
            det = -det;
        }
        det *= pivot;
        for i in col + 1..n {
            let factor = a[(i, col)] / pivot;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[(i, k)] -= factor * a[(col, k)];
            }
        }
    }
    det
}
