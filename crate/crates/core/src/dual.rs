//! Unit outward facet normals and the dual Gram matrix.
//!
//! `G*_ij = ⟨f_i, f_j⟩` where `f_i` is the unit outward normal of the facet
//! opposite vertex `i`. `G*` is positive semidefinite with a one-dimensional
//! kernel spanned by the vector of facet areas, because the area-weighted
//! normals of a closed simplex sum to zero.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, SymMatrix, DEFAULT_NULL_TOL};
use crate::simplex::{self, FaceId, SimplexEmbedding, SquaredEdgeLengths};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualGramReport {
    pub gstar: SymMatrix,
    /// `areas[i]` is the (n-1)-volume of the facet opposite vertex `i`.
    pub areas: Vec<f64>,
    pub normals: Vec<Vec<f64>>,
    /// `‖G*·A‖ / ‖A‖`.
    pub null_residual: f64,
    /// `‖Σ A_i f_i‖ / ‖A‖`.
    pub divergence_residual: f64,
}

/// Unit outward normals `f_0..f_n`, `f_i` belonging to the facet opposite `v_i`.
///
/// The facet hyperplane opposite `v_i` is a level set of the barycentric
/// coordinate `λ_i`, so its normal is `∇λ_i`: row `i-1` of `V⁻¹` for `i >= 1`
/// and minus their sum for `i = 0`. Orientation is then fixed by requiring
/// `⟨f_i, v_i - c_i⟩ < 0` with `c_i` the facet centroid.
pub fn outward_normals(emb: &SimplexEmbedding) -> Result<Vec<Vec<f64>>> {
    let n = emb.dim();
    let inv = linalg::inverse(emb.matrix()).map_err(|_| Error::DegenerateFacet(0))?;
    let mut grads: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut g0 = vec![0.0; n];
    for i in 0..n {
        for (acc, x) in g0.iter_mut().zip(inv.row(i)) {
            *acc -= x;
        }
    }
    grads.push(g0);
    grads.extend((0..n).map(|i| inv.row(i).to_vec()));

    let vertices = emb.vertices();
    grads
        .into_iter()
        .enumerate()
        .map(|(i, g)| {
            let len = linalg::norm(&g);
            if !(len.is_finite() && len > 0.0) {
                return Err(Error::DegenerateFacet(i));
            }
            let mut f: Vec<f64> = g.iter().map(|x| -x / len).collect();
            let centroid: Vec<f64> = (0..n)
                .map(|d| {
                    vertices
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| k != i)
                        .map(|(_, v)| v[d])
                        .sum::<f64>()
                        / n as f64
                })
                .collect();
            let to_vertex: Vec<f64> = vertices[i].iter().zip(&centroid).map(|(a, b)| a - b).collect();
            if linalg::dot(&f, &to_vertex) > 0.0 {
                f.iter_mut().for_each(|x| *x = -*x);
            }
            Ok(f)
        })
        .collect()
}

/// Dual Gram matrix, facet areas and the two identity residuals.
pub fn dual_gram(ell: &SquaredEdgeLengths) -> Result<DualGramReport> {
    dual_gram_with_tolerance(ell, None)
}

pub fn dual_gram_with_tolerance(ell: &SquaredEdgeLengths, tol: Option<f64>) -> Result<DualGramReport> {
    let n = ell.dim();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "dual Gram matrix needs dimension at least 2".into(),
        ));
    }
    let emb = simplex::embed_with_tolerance(ell, tol)?;
    let normals = outward_normals(&emb)?;
    let gstar = SymMatrix::from_upper(n + 1, |i, j| {
        if i == j {
            linalg::dot(&normals[i], &normals[i])
        } else {
            linalg::dot(&normals[i], &normals[j]).clamp(-1.0, 1.0)
        }
    });
    let areas = (0..=n)
        .map(|i| simplex::face_volume(ell, &FaceId::facet(n, i)))
        .collect::<Result<Vec<f64>>>()?;
    let area_norm = linalg::norm(&areas);
    let null_residual = linalg::norm(&gstar.mul_vec(&areas)) / area_norm;
    let weighted: Vec<f64> = (0..n)
        .map(|d| areas.iter().zip(&normals).map(|(a, f)| a * f[d]).sum())
        .collect();
    let divergence_residual = linalg::norm(&weighted) / area_norm;
    Ok(DualGramReport {
        gstar,
        areas,
        normals,
        null_residual,
        divergence_residual,
    })
}

/// `adj(G*)_ii / adj(G*)_jj`, which equals `(A_i / A_j)²`.
pub fn area_ratio_from_adjugate(ell: &SquaredEdgeLengths, i: usize, j: usize) -> Result<f64> {
    let n = ell.dim();
    if i > n || j > n || i == j {
        return Err(Error::InvalidArgument(format!(
            "need two distinct vertices in 0..={n}, got {i} and {j}"
        )));
    }
    let report = dual_gram(ell)?;
    let adj = linalg::adjugate(&report.gstar)?;
    let scale = (0..=n).map(|k| adj[(k, k)].abs()).fold(0.0, f64::max);
    if !(adj[(j, j)].abs() > 1e-12 * scale) {
        return Err(Error::NearZeroCofactor(j));
    }
    Ok(adj[(i, i)] / adj[(j, j)])
}

/// Unit vector spanning the kernel of `G*`, oriented with positive components.
pub fn null_direction(gstar: &SymMatrix) -> Result<Vec<f64>> {
    let eig = linalg::eigendecompose(gstar)?;
    let scale = eig.largest_magnitude().max(1.0);
    let zeros: Vec<usize> = (0..gstar.size())
        .filter(|&k| eig.eigenvalues[k].abs() <= DEFAULT_NULL_TOL * scale)
        .collect();
    if zeros.len() != 1 {
        return Err(Error::NullityNotOne {
            nullity: zeros.len(),
        });
    }
    let mut v = eig.eigenvector(zeros[0]);
    if v.iter().sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::{regular_simplex, right_corner_simplex};

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn right_triangle_normals() {
        let emb = simplex::embed(&right_corner_simplex(2).unwrap()).unwrap();
        let f = outward_normals(&emb).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!(close(&f[0], &[h, h], 1e-15));
        assert!(close(&f[1], &[-1.0, 0.0], 1e-15));
        assert!(close(&f[2], &[0.0, -1.0], 1e-15));
    }

    #[test]
    fn right_corner_tetrahedron_normals() {
        let emb = simplex::embed(&right_corner_simplex(3).unwrap()).unwrap();
        let f = outward_normals(&emb).unwrap();
        let t = 1.0 / 3f64.sqrt();
        assert!(close(&f[0], &[t, t, t], 1e-15));
        assert!(close(&f[1], &[-1.0, 0.0, 0.0], 1e-15));
        assert!(close(&f[2], &[0.0, -1.0, 0.0], 1e-15));
        assert!(close(&f[3], &[0.0, 0.0, -1.0], 1e-15));
    }

    #[test]
    fn equilateral_triangle() {
        let r = dual_gram(&regular_simplex(2, 3.0).unwrap()).unwrap();
        for i in 0..3 {
            assert!((r.gstar[(i, i)] - 1.0).abs() < 1e-15);
            for j in 0..3 {
                if i != j {
                    assert!((r.gstar[(i, j)] + 0.5).abs() < 1e-15);
                }
            }
        }
        let u = null_direction(&r.gstar).unwrap();
        let t = 1.0 / 3f64.sqrt();
        assert!(close(&u, &[t, t, t], 1e-12));
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            assert!((area_ratio_from_adjugate(&regular_simplex(2, 3.0).unwrap(), i, j).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn right_triangle_dual_gram() {
        let ell = right_corner_simplex(2).unwrap();
        let r = dual_gram(&ell).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((r.gstar[(0, 1)] + h).abs() < 1e-15);
        assert!((r.gstar[(0, 2)] + h).abs() < 1e-15);
        assert!(r.gstar[(1, 2)].abs() < 1e-15);
        assert!(close(&r.areas, &[2f64.sqrt(), 1.0, 1.0], 1e-15));
        assert!(r.null_residual < 1e-15);
        assert!(r.divergence_residual < 1e-15);

        let u = null_direction(&r.gstar).unwrap();
        let a = linalg::norm(&r.areas);
        assert!(close(&u, &r.areas.iter().map(|x| x / a).collect::<Vec<_>>(), 1e-12));
        assert!((area_ratio_from_adjugate(&ell, 0, 1).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn right_corner_tetrahedron_ratio() {
        let ell = right_corner_simplex(3).unwrap();
        assert!((area_ratio_from_adjugate(&ell, 0, 1).unwrap() - 3.0).abs() < 1e-12);
        assert!(area_ratio_from_adjugate(&ell, 1, 1).is_err());
        assert!(area_ratio_from_adjugate(&ell, 0, 4).is_err());
    }

    #[test]
    fn regular_simplex_null_direction_is_uniform() {
        for n in 2..=7 {
            let r = dual_gram(&regular_simplex(n, 1.0).unwrap()).unwrap();
            let u = null_direction(&r.gstar).unwrap();
            let c = 1.0 / ((n + 1) as f64).sqrt();
            assert!(u.iter().all(|x| (x - c).abs() < 1e-10));
        }
    }

    #[test]
    fn rejects_invalid_and_low_dimension() {
        let bad = SquaredEdgeLengths::new(2, vec![1.0, 1.0, 9.0]).unwrap();
        assert!(matches!(dual_gram(&bad), Err(Error::NotRealizable { .. })));
        let seg = SquaredEdgeLengths::new(1, vec![1.0]).unwrap();
        assert!(dual_gram(&seg).is_err());
        assert!(matches!(
            null_direction(&SymMatrix::identity(3)),
            Err(Error::NullityNotOne { nullity: 0 })
        ));
    }
}
