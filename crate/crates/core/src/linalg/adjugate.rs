use super::{determinant, dot, eigen, fix_sign, outer_product, Matrix, SymMatrix, DEFAULT_NULL_TOL};
use crate::error::{Error, Result};

/// Largest size for which the adjugate is formed from explicit cofactors.
const COFACTOR_MAX_SIZE: usize = 4;

/// Adjugate of a symmetric matrix, `M · adj(M) = det(M) · I`.
///
/// Up to 4×4 this is the cofactor definition. Larger matrices go through the
/// eigendecomposition: `Q · diag(Π_{j≠i} λ_j) · Qᵀ` when invertible, the rank-one
/// form `(Π nonzero λ) · u uᵀ` at nullity one and the zero matrix beyond that.
pub fn adjugate(m: &SymMatrix) -> Result<Matrix> {
    let n = m.size();
    if n <= COFACTOR_MAX_SIZE {
        return Ok(adjugate_general(m));
    }
    let eig = eigen::eigendecompose(m)?;
    let scale = eig.largest_magnitude().max(1.0);
    let zeros: Vec<usize> = (0..n)
        .filter(|&i| eig.eigenvalues[i].abs() <= DEFAULT_NULL_TOL * scale)
        .collect();
    match zeros.len() {
        0 => {
            let weights: Vec<f64> = (0..n)
                .map(|i| (0..n).filter(|&j| j != i).map(|j| eig.eigenvalues[j]).product())
                .collect();
            Ok(Matrix::from_fn(n, n, |r, c| {
                (0..n)
                    .map(|k| weights[k] * eig.basis[(r, k)] * eig.basis[(c, k)])
                    .sum()
            }))
        }
        1 => {
            let z = zeros[0];
            let p: f64 = (0..n).filter(|&j| j != z).map(|j| eig.eigenvalues[j]).product();
            let u = eig.eigenvector(z);
            Ok(Matrix::from_fn(n, n, |r, c| p * u[r] * u[c]))
        }
        _ => Ok(Matrix::zeros(n, n)),
    }
}

/// Adjugate of an arbitrary square matrix by cofactors:
/// `adj(M)[i][j] = (-1)^(i+j) det(M with row j and column i removed)`.
pub fn adjugate_general(m: &Matrix) -> Matrix {
    assert!(m.is_square(), "adjugate of a non-square matrix");
    let n = m.rows();
    if n == 1 {
        return Matrix::identity(1);
    }
    Matrix::from_fn(n, n, |i, j| {
        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        sign * small_determinant(&m.minor(j, i))
    })
}

fn small_determinant(m: &Matrix) -> f64 {
    match m.rows() {
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        3 => {
            m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
                - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
                + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
        }
        _ => determinant(m),
    }
}

/// Rank-one form of the adjugate of a nullity-one matrix,
/// `adj(M) = c · (v ⊗ w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rank1Adjugate {
    pub c: f64,
    /// Unit vector spanning the null space of `M`.
    pub v: Vec<f64>,
    /// Unit vector spanning the null space of `Mᵀ`.
    pub w: Vec<f64>,
    /// Product of the nonzero eigenvalues of `M`; equals `c · ⟨v, w⟩`.
    pub nonzero_eigenvalue_product: f64,
}

impl Rank1Adjugate {
    pub fn reconstruct(&self) -> Matrix {
        outer_product(&self.v, &self.w)
            .expect("v and w have equal length")
            .scale(self.c)
    }
}

/// Decomposes the adjugate of a nullity-one square matrix.
///
/// Both null vectors are unit length with their first nonzero component
/// positive. For symmetric input `v = w`, the nullity is counted on the
/// eigenvalues and `c` is the product of the nonzero ones. For general input
/// the nullity is counted on singular values and `c = det(M + w ⊗ v)`, which
/// holds because `det(M + w vᵀ) = vᵀ adj(M) w` when `det M = 0`.
pub fn adjugate_rank1_decompose(m: &Matrix, null_tol: f64) -> Result<Rank1Adjugate> {
    if !m.is_square() {
        return Err(Error::BadShape {
            expected: m.rows() * m.rows(),
            got: m.rows() * m.cols(),
        });
    }
    if m.is_symmetric() {
        let sym = SymMatrix::from_matrix(m.clone())?;
        let eig = eigen::eigendecompose(&sym)?;
        let scale = eig.largest_magnitude().max(1.0);
        let zeros: Vec<usize> = (0..m.rows())
            .filter(|&i| eig.eigenvalues[i].abs() <= null_tol * scale)
            .collect();
        if zeros.len() != 1 {
            return Err(Error::NullityNotOne {
                nullity: zeros.len(),
            });
        }
        let z = zeros[0];
        let mut v = eig.eigenvector(z);
        fix_sign(&mut v);
        let p: f64 = eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != z)
            .map(|(_, l)| l)
            .product();
        return Ok(Rank1Adjugate {
            c: p / dot(&v, &v),
            w: v.clone(),
            v,
            nonzero_eigenvalue_product: p,
        });
    }

    let (singular, right) = eigen::singular_decompose(m)?;
    let (_, left) = eigen::singular_decompose(&m.transpose())?;
    let smax = singular.last().copied().unwrap_or(0.0).max(1.0);
    let nullity = singular.iter().filter(|&&s| s <= null_tol * smax).count();
    if nullity != 1 {
        return Err(Error::NullityNotOne { nullity });
    }
    let mut v = right.column(0);
    let mut w = left.column(0);
    fix_sign(&mut v);
    fix_sign(&mut w);
    let c = determinant(&m.add(&outer_product(&w, &v)?));
    Ok(Rank1Adjugate {
        c,
        nonzero_eigenvalue_product: c * dot(&v, &w),
        v,
        w,
    })
}
