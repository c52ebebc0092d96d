//! Derivatives of `t ↦ log det(A + tB)` at `t = 0`.

use super::{cholesky_factor, solve_lower, solve_upper, Matrix, SymMatrix};
use crate::error::{Error, Result};

/// `A⁻¹B` via the Cholesky factor of `A`.
fn solve_with(a: &SymMatrix, b: &SymMatrix) -> Result<Matrix> {
    if a.size() != b.size() {
        return Err(Error::DimensionMismatch {
            left: a.size(),
            right: b.size(),
        });
    }
    let l = cholesky_factor(a)?;
    let lt = l.transpose();
    let n = a.size();
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| solve_upper(&lt, &solve_lower(&l, &b.column(j))))
        .collect();
    Matrix::from_columns(&cols)
}

/// `log det A` for positive definite `A`.
pub fn log_determinant(a: &SymMatrix) -> Result<f64> {
    let l = cholesky_factor(a)?;
    Ok(2.0 * (0..a.size()).map(|i| l[(i, i)].ln()).sum::<f64>())
}

/// `d/dt log det(A + tB)` at 0, i.e. `tr(A⁻¹B)`.
pub fn logdet_directional_derivative(a: &SymMatrix, b: &SymMatrix) -> Result<f64> {
    Ok(solve_with(a, b)?.trace())
}

/// `d²/dt² log det(A + tB)` at 0, i.e. `-tr(A⁻¹BA⁻¹B)`.
pub fn logdet_second_derivative(a: &SymMatrix, b: &SymMatrix) -> Result<f64> {
    let c = solve_with(a, b)?;
    let n = c.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            sum += c[(i, j)] * c[(j, i)];
        }
    }
    Ok(-sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigendecompose;

    #[test]
    fn first_derivative_examples() {
        for n in 1..5 {
            let i = SymMatrix::identity(n);
            assert_eq!(logdet_directional_derivative(&i, &i).unwrap(), n as f64);
        }
        let a = SymMatrix::diag(&[1.0, 2.0]);
        let b = SymMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(logdet_directional_derivative(&a, &b).unwrap(), 0.0);
        let d = logdet_directional_derivative(&SymMatrix::diag(&[2.0]), &SymMatrix::diag(&[3.0]));
        assert!((d.unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn second_derivative_examples() {
        let i3 = SymMatrix::identity(3);
        assert_eq!(logdet_second_derivative(&i3, &i3).unwrap(), -3.0);
        let a = SymMatrix::diag(&[1.0, 2.0]);
        let b = SymMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!((logdet_second_derivative(&a, &b).unwrap() + 1.0).abs() < 1e-15);
        let a = SymMatrix::from_rows(&[[3.0, 1.0], [1.0, 2.0]]).unwrap();
        assert_eq!(logdet_second_derivative(&a, &SymMatrix::zeros(2)).unwrap(), 0.0);
    }

    #[test]
    fn non_pd_base_is_rejected() {
        let a = SymMatrix::diag(&[1.0, -1.0]);
        assert!(matches!(
            logdet_directional_derivative(&a, &a),
            Err(Error::NotPositiveDefinite { pivot: 1 })
        ));
        assert!(logdet_second_derivative(&SymMatrix::identity(2), &SymMatrix::identity(3)).is_err());
    }

    // −Σ b'ᵢⱼ² / (λᵢ λⱼ) with B' = Qᵀ B Q and A = Q Λ Qᵀ.
    #[test]
    fn second_derivative_in_eigenbasis() {
        let a = SymMatrix::from_rows(&[[4.0, 1.0, 0.5], [1.0, 3.0, -0.2], [0.5, -0.2, 2.0]]).unwrap();
        let b = SymMatrix::from_rows(&[[0.3, -1.0, 2.0], [-1.0, 0.0, 0.7], [2.0, 0.7, -1.1]]).unwrap();
        let e = eigendecompose(&a).unwrap();
        let bp = e.basis.transpose().matmul(&b).matmul(&e.basis);
        let mut sum = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                sum += bp[(i, j)] * bp[(i, j)] / (e.eigenvalues[i] * e.eigenvalues[j]);
            }
        }
        let d2 = logdet_second_derivative(&a, &b).unwrap();
        assert!((d2 + sum).abs() < 1e-13 * sum);
        assert!(d2 < 0.0);
    }

    #[test]
    fn log_determinant_of_diagonal() {
        let ld = log_determinant(&SymMatrix::diag(&[2.0, 3.0])).unwrap();
        assert!((ld - 6f64.ln()).abs() < 1e-15);
    }
}
