//! Simplices in squared-edge-length coordinates.
//!
//! A simplex with vertices `v0..vn` is stored as the `C(n+1, 2)` squared
//! distances `s_ij = |vi - vj|²`, in lexicographic edge order
//! `(0,1), (0,2), ..., (0,n), (1,2), ..., (n-1,n)`. The Gram matrix of the
//! edge vectors anchored at `v0` is linear in these coordinates, which is
//! what makes the set of non-degenerate simplices a convex cone here.

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, SymMatrix, DEFAULT_PD_TOL};

/// Number of edges of an n-simplex, `n(n+1)/2`.
pub fn edge_count(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Position of edge `(i, j)`, `i < j <= n`, in lexicographic order.
pub fn edge_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j <= n);
    i * n - i * (i.saturating_sub(1)) / 2 + (j - i - 1)
}

/// Squared edge lengths of an n-simplex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SquaredEdgeLengths {
    #[serde(rename = "dimension")]
    n: usize,
    #[serde(rename = "squared_lengths")]
    s: Vec<f64>,
}

impl SquaredEdgeLengths {
    pub fn new(n: usize, s: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidLengths("dimension must be at least 1".into()));
        }
        let expected = edge_count(n);
        if s.len() != expected {
            return Err(Error::InvalidLengths(format!(
                "dimension {n} needs {expected} squared lengths, got {}",
                s.len()
            )));
        }
        if let Some((e, v)) = s.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidLengths(format!(
                "entry {e} is {v}; squared lengths must be finite and strictly positive"
            )));
        }
        Ok(SquaredEdgeLengths { n, s })
    }

    /// Squares plain edge lengths on the way in.
    pub fn from_lengths(n: usize, lengths: &[f64]) -> Result<Self> {
        if let Some(l) = lengths.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::InvalidLengths(format!(
                "edge length {l} is not strictly positive"
            )));
        }
        SquaredEdgeLengths::new(n, lengths.iter().map(|l| l * l).collect())
    }

    /// Pairwise squared distances of `n + 1` points in any ambient dimension.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidLengths("need at least two points".into()));
        }
        let n = points.len() - 1;
        let s = (0..=n)
            .tuple_combinations()
            .map(|(i, j)| {
                points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum()
            })
            .collect();
        SquaredEdgeLengths::new(n, s)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.s
    }

    pub fn into_values(self) -> Vec<f64> {
        self.s
    }

    /// `s_ij`, symmetric in its arguments, zero on the diagonal.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.s[edge_index(self.n, i, j)],
            std::cmp::Ordering::Greater => self.s[edge_index(self.n, j, i)],
        }
    }

    /// Edges `(i, j)` in storage order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> {
        (0..=self.n).tuple_combinations()
    }

    pub fn total(&self) -> f64 {
        self.s.iter().sum()
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        SquaredEdgeLengths::new(self.n, self.s.iter().map(|x| x * t).collect())
    }

    /// Relabels vertices: new vertex `k` is old vertex `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n + 1];
        if perm.len() != self.n + 1 || perm.iter().any(|&p| p > self.n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidArgument(format!(
                "{perm:?} is not a permutation of 0..={}",
                self.n
            )));
        }
        let s = (0..=self.n)
            .tuple_combinations()
            .map(|(i, j)| self.get(perm[i], perm[j]))
            .collect();
        SquaredEdgeLengths::new(self.n, s)
    }
}

/// A face named by its sorted vertex list; `m + 1` vertices make an m-face.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FaceId(Vec<usize>);

impl FaceId {
    pub fn new(vertices: Vec<usize>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidFace(format!(
                "a face needs at least 2 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFace(format!(
                "vertices {vertices:?} must be strictly increasing"
            )));
        }
        Ok(FaceId(vertices))
    }

    /// The whole simplex as a face.
    pub fn full(n: usize) -> Self {
        FaceId((0..=n).collect())
    }

    /// The facet opposite vertex `i`.
    pub fn facet(n: usize, i: usize) -> Self {
        FaceId((0..=n).filter(|&v| v != i).collect())
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    /// Dimension of the face (vertex count minus one).
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    fn check(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&last) if last > n => Err(Error::InvalidFace(format!(
                "vertex {last} out of range for a {n}-simplex"
            ))),
            _ => Ok(()),
        }
    }
}

/// All k-faces of an n-simplex in lexicographic order.
pub fn k_faces(n: usize, k: usize) -> Vec<FaceId> {
    (0..=n).combinations(k + 1).map(FaceId).collect()
}

/// Gram matrix anchored at vertex 0:
/// `G_ij = (s_0i + s_0j - s_ij) / 2`, `G_ii = s_0i`.
pub fn gram_from_squared_lengths(ell: &SquaredEdgeLengths) -> SymMatrix {
    SymMatrix::from_upper(ell.n, |i, j| {
        let (a, b) = (i + 1, j + 1);
        if a == b {
            ell.get(0, a)
        } else {
            0.5 * (ell.get(0, a) + ell.get(0, b) - ell.get(a, b))
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Valid,
    Degenerate,
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport {
    pub verdict: Verdict,
    pub smallest_gram_eigenvalue: f64,
    pub largest_gram_eigenvalue: f64,
    pub tolerance: f64,
    /// `tolerance · |largest eigenvalue|`: the half-width of the degenerate band.
    pub threshold: f64,
    pub triangle_inequalities_hold: bool,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.verdict == Verdict::Valid
    }
}

/// Decides realizability from the sign of the smallest Gram eigenvalue.
///
/// The degenerate band is relative to the largest eigenvalue so the verdict
/// does not change when all squared lengths are scaled by the same factor.
pub fn validate(ell: &SquaredEdgeLengths, tol: Option<f64>) -> Result<ValidityReport> {
    let tolerance = tol.unwrap_or(DEFAULT_PD_TOL);
    let eig = linalg::eigendecompose(&gram_from_squared_lengths(ell))?;
    let smallest = eig.eigenvalues[0];
    let largest = *eig.eigenvalues.last().expect("n >= 1");
    let threshold = tolerance * largest.abs();
    let verdict = if smallest > threshold {
        Verdict::Valid
    } else if smallest >= -threshold {
        Verdict::Degenerate
    } else {
        Verdict::Invalid
    };
    Ok(ValidityReport {
        verdict,
        smallest_gram_eigenvalue: smallest,
        largest_gram_eigenvalue: largest,
        tolerance,
        threshold,
        triangle_inequalities_hold: triangle_inequalities_hold(ell),
    })
}

/// Strict triangle inequalities on every vertex triple.
pub fn triangle_inequalities_hold(ell: &SquaredEdgeLengths) -> bool {
    (0..=ell.n).tuple_combinations().all(|(i, j, k)| {
        let a = ell.get(i, j).sqrt();
        let b = ell.get(i, k).sqrt();
        let c = ell.get(j, k).sqrt();
        a < b + c && b < a + c && c < a + b
    })
}

/// Vertex coordinates: `v0` at the origin, `v1..vn` the columns of `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexEmbedding {
    n: usize,
    v: Matrix,
}

impl SimplexEmbedding {
    pub fn from_matrix(v: Matrix) -> Result<Self> {
        if !v.is_square() {
            return Err(Error::BadShape {
                expected: v.rows() * v.rows(),
                got: v.rows() * v.cols(),
            });
        }
        Ok(SimplexEmbedding { n: v.rows(), v })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix {
        &self.v
    }

    pub fn vertex(&self, i: usize) -> Vec<f64> {
        if i == 0 {
            vec![0.0; self.n]
        } else {
            self.v.column(i - 1)
        }
    }

    pub fn vertices(&self) -> Vec<Vec<f64>> {
        (0..=self.n).map(|i| self.vertex(i)).collect()
    }

    /// `VᵀV`.
    pub fn gram(&self) -> SymMatrix {
        let cols: Vec<Vec<f64>> = (0..self.n).map(|j| self.v.column(j)).collect();
        SymMatrix::from_upper(self.n, |i, j| linalg::dot(&cols[i], &cols[j]))
    }

    pub fn squared_lengths(&self) -> Result<SquaredEdgeLengths> {
        SquaredEdgeLengths::from_points(&self.vertices())
    }
}

/// Canonical embedding: `V = Lᵀ` with `G = L Lᵀ`, so `V` is upper triangular
/// with positive diagonal.
pub fn embed(ell: &SquaredEdgeLengths) -> Result<SimplexEmbedding> {
    embed_with_tolerance(ell, None)
}

pub fn embed_with_tolerance(ell: &SquaredEdgeLengths, tol: Option<f64>) -> Result<SimplexEmbedding> {
    let report = validate(ell, tol)?;
    if !report.is_valid() {
        return Err(Error::NotRealizable {
            smallest_eigenvalue: report.smallest_gram_eigenvalue,
        });
    }
    let l = linalg::cholesky_factor(&gram_from_squared_lengths(ell))?;
    SimplexEmbedding::from_matrix(l.transpose())
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `√det G / n!`; exactly 0 for degenerate input.
pub fn volume(ell: &SquaredEdgeLengths) -> Result<f64> {
    volume_with_tolerance(ell, None)
}

pub fn volume_with_tolerance(ell: &SquaredEdgeLengths, tol: Option<f64>) -> Result<f64> {
    let report = validate(ell, tol)?;
    match report.verdict {
        Verdict::Valid => {
            let l = linalg::cholesky_factor(&gram_from_squared_lengths(ell))?;
            let det_v: f64 = (0..ell.n).map(|i| l[(i, i)]).product();
            Ok(det_v / factorial(ell.n))
        }
        Verdict::Degenerate => Ok(0.0),
        Verdict::Invalid => Err(Error::NotRealizable {
            smallest_eigenvalue: report.smallest_gram_eigenvalue,
        }),
    }
}

/// Restriction to the edges of `f`, with the face's vertices relabeled
/// `0..=k` in increasing order (so the face's Gram matrix is anchored at its
/// smallest vertex).
pub fn face_squared_lengths(ell: &SquaredEdgeLengths, f: &FaceId) -> Result<SquaredEdgeLengths> {
    f.check(ell.n)?;
    let vs = f.vertices();
    let s = vs
        .iter()
        .tuple_combinations()
        .map(|(&i, &j)| ell.get(i, j))
        .collect();
    SquaredEdgeLengths::new(f.dim(), s)
}

/// k-dimensional measure of the face `f`.
pub fn face_volume(ell: &SquaredEdgeLengths, f: &FaceId) -> Result<f64> {
    volume(&face_squared_lengths(ell, f)?)
}

/// Regular simplex with all squared lengths equal and summing to `total`.
pub fn regular_simplex(n: usize, total: f64) -> Result<SquaredEdgeLengths> {
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::InvalidArgument(format!("total must be positive, got {total}")));
    }
    let m = edge_count(n);
    SquaredEdgeLengths::new(n, vec![total / m as f64; m])
}

/// Orthonormal legs from vertex 0: `s_0i = 1`, `s_ij = 2`. Gram matrix is `I`.
pub fn right_corner_simplex(n: usize) -> Result<SquaredEdgeLengths> {
    let s = (0..=n)
        .tuple_combinations()
        .map(|(i, _j): (usize, usize)| if i == 0 { 1.0 } else { 2.0 })
        .collect();
    SquaredEdgeLengths::new(n, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit(n: usize) -> SquaredEdgeLengths {
        SquaredEdgeLengths::new(n, vec![1.0; edge_count(n)]).unwrap()
    }

    #[test]
    fn edge_indexing_is_lexicographic() {
        let n = 4;
        let order: Vec<_> = (0..=n).tuple_combinations::<(usize, usize)>().collect();
        for (k, &(i, j)) in order.iter().enumerate() {
            assert_eq!(edge_index(n, i, j), k);
        }
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(SquaredEdgeLengths::new(2, vec![1.0, 1.0]).is_err());
        assert!(SquaredEdgeLengths::new(2, vec![1.0, 0.0, 1.0]).is_err());
        assert!(SquaredEdgeLengths::new(2, vec![1.0, f64::NAN, 1.0]).is_err());
        assert!(SquaredEdgeLengths::new(0, vec![]).is_err());
    }

    #[test]
    fn gram_examples() {
        let g = gram_from_squared_lengths(&unit(2));
        assert_eq!(g.to_rows(), vec![vec![1.0, 0.5], vec![0.5, 1.0]]);
        let g = gram_from_squared_lengths(&right_corner_simplex(3).unwrap());
        assert_eq!(g.as_matrix(), &Matrix::identity(3));
        let g = gram_from_squared_lengths(&unit(3));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(g[(i, j)], if i == j { 1.0 } else { 0.5 });
            }
        }
    }

    #[test]
    fn validate_unit_tetrahedron() {
        let r = validate(&unit(3), None).unwrap();
        assert_eq!(r.verdict, Verdict::Valid);
        assert!((r.smallest_gram_eigenvalue - 0.5).abs() < 1e-15);
        assert!(r.triangle_inequalities_hold);
    }

    #[test]
    fn apex_too_close_is_invalid_despite_triangles() {
        let a = 0.51f64 * 0.51;
        let ell = SquaredEdgeLengths::new(3, vec![a, a, a, 1.0, 1.0, 1.0]).unwrap();
        let r = validate(&ell, None).unwrap();
        assert_eq!(r.verdict, Verdict::Invalid);
        assert!(r.triangle_inequalities_hold);
    }

    #[test]
    fn flat_triangle_is_degenerate() {
        let ell = SquaredEdgeLengths::new(2, vec![1.0, 4.0, 1.0]).unwrap();
        assert_eq!(validate(&ell, None).unwrap().verdict, Verdict::Degenerate);
        assert_eq!(volume(&ell).unwrap(), 0.0);
    }

    #[test]
    fn triangle_inequality_examples() {
        assert!(triangle_inequalities_hold(&unit(3)));
        let ell = SquaredEdgeLengths::new(2, vec![1.0, 1.0, 9.0]).unwrap();
        assert!(!triangle_inequalities_hold(&ell));
        assert!(matches!(volume(&ell), Err(Error::NotRealizable { .. })));
    }

    #[test]
    fn embedding_examples() {
        let e = embed(&right_corner_simplex(3).unwrap()).unwrap();
        assert_eq!(e.matrix(), &Matrix::identity(3));

        let e = embed(&unit(2)).unwrap();
        assert_eq!(e.vertex(1), vec![1.0, 0.0]);
        let v2 = e.vertex(2);
        assert!((v2[0] - 0.5).abs() < 1e-15 && (v2[1] - 3f64.sqrt() / 2.0).abs() < 1e-15);

        let bad = SquaredEdgeLengths::new(2, vec![1.0, 1.0, 9.0]).unwrap();
        assert!(matches!(embed(&bad), Err(Error::NotRealizable { .. })));
    }

    #[test]
    fn volume_examples() {
        assert!((volume(&unit(2)).unwrap() - 3f64.sqrt() / 4.0).abs() < 1e-15);
        assert!((volume(&unit(3)).unwrap() - 2f64.sqrt() / 12.0).abs() < 1e-15);
        assert!((volume(&right_corner_simplex(3).unwrap()).unwrap() - 1.0 / 6.0).abs() < 1e-16);
    }

    #[test]
    fn face_restriction() {
        let ell = SquaredEdgeLengths::new(3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let f = face_squared_lengths(&ell, &FaceId::new(vec![0, 1, 2]).unwrap()).unwrap();
        assert_eq!(f.values(), &[1.0, 2.0, 4.0]);
        let f = face_squared_lengths(&ell, &FaceId::new(vec![1, 2, 3]).unwrap()).unwrap();
        assert_eq!(f.values(), &[4.0, 5.0, 6.0]);
        assert_eq!(face_squared_lengths(&ell, &FaceId::full(3)).unwrap(), ell);
        assert!(face_squared_lengths(&ell, &FaceId::new(vec![1, 4]).unwrap()).is_err());
        assert!(FaceId::new(vec![2]).is_err());
        assert!(FaceId::new(vec![2, 1]).is_err());
    }

    #[test]
    fn face_volume_examples() {
        let t = unit(3);
        for f in k_faces(3, 2) {
            assert!((face_volume(&t, &f).unwrap() - 3f64.sqrt() / 4.0).abs() < 1e-15);
        }
        let ell = SquaredEdgeLengths::new(3, vec![1.0, 2.0, 3.0, 2.5, 3.5, 3.0]).unwrap();
        for (i, j) in ell.edges() {
            let f = FaceId::new(vec![i, j]).unwrap();
            assert!((face_volume(&ell, &f).unwrap() - ell.get(i, j).sqrt()).abs() < 1e-15);
        }
        assert_eq!(face_volume(&ell, &FaceId::full(3)).unwrap(), volume(&ell).unwrap());
    }

    #[test]
    fn regular_simplex_examples() {
        assert_eq!(regular_simplex(2, 3.0).unwrap().values(), &[1.0; 3]);
        assert_eq!(regular_simplex(3, 6.0).unwrap().values(), &[1.0; 6]);
        for n in 1..=12 {
            let r = regular_simplex(n, 7.0).unwrap();
            assert!((r.total() - 7.0).abs() < 1e-12);
            assert!(validate(&r, None).unwrap().is_valid());
        }
    }

    #[test]
    fn permutation_is_checked() {
        let ell = unit(2);
        assert!(ell.permuted(&[0, 0, 1]).is_err());
        assert!(ell.permuted(&[0, 1]).is_err());
        let p = SquaredEdgeLengths::new(2, vec![1.0, 2.0, 3.0]).unwrap().permuted(&[2, 0, 1]).unwrap();
        // new (0,1) = old (2,0) = 2; new (0,2) = old (2,1) = 3; new (1,2) = old (0,1) = 1
        assert_eq!(p.values(), &[2.0, 3.0, 1.0]);
    }

    fn points_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
        (1usize..=6).prop_flat_map(|n| {
            prop::collection::vec(prop::collection::vec(-1.0f64..1.0, n), n + 1)
        })
    }

    proptest! {
        #[test]
        fn embedding_round_trip(points in points_strategy()) {
            let ell = SquaredEdgeLengths::from_points(&points);
            prop_assume!(ell.is_ok());
            let ell = ell.unwrap();
            let r = validate(&ell, None).unwrap();
            prop_assume!(r.smallest_gram_eigenvalue > 1e-6 * r.largest_gram_eigenvalue);
            let back = embed(&ell).unwrap().squared_lengths().unwrap();
            for (a, b) in ell.values().iter().zip(back.values()) {
                prop_assert!((a - b).abs() <= 1e-9 * a);
            }
        }

        #[test]
        fn scale_equivariance(points in points_strategy(), t in 0.1f64..10.0) {
            let ell = SquaredEdgeLengths::from_points(&points);
            prop_assume!(ell.is_ok());
            let ell = ell.unwrap();
            let r = validate(&ell, None).unwrap();
            prop_assume!(r.smallest_gram_eigenvalue > 1e-6 * r.largest_gram_eigenvalue);
            let scaled = ell.scaled(t).unwrap();
            prop_assert_eq!(validate(&scaled, None).unwrap().verdict, r.verdict);
            let n = ell.dim() as f64;
            let v = volume(&ell).unwrap();
            let vt = volume(&scaled).unwrap();
            prop_assert!((vt - t.powf(n / 2.0) * v).abs() <= 1e-10 * vt);
        }

        #[test]
        fn relabeling_invariance(points in points_strategy(), seed in any::<u64>()) {
            let ell = SquaredEdgeLengths::from_points(&points);
            prop_assume!(ell.is_ok());
            let ell = ell.unwrap();
            let r = validate(&ell, None).unwrap();
            prop_assume!(r.smallest_gram_eigenvalue > 1e-6 * r.largest_gram_eigenvalue);
            let mut perm: Vec<usize> = (0..=ell.dim()).collect();
            let mut x = seed;
            for i in (1..perm.len()).rev() {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (x >> 33) as usize % (i + 1));
            }
            let p = ell.permuted(&perm).unwrap();
            prop_assert_eq!(validate(&p, None).unwrap().verdict, r.verdict);
            let v = volume(&ell).unwrap();
            prop_assert!((volume(&p).unwrap() - v).abs() <= 1e-9 * v);
        }

        #[test]
        fn valid_implies_triangle_inequalities(points in points_strategy()) {
            let ell = SquaredEdgeLengths::from_points(&points);
            prop_assume!(ell.is_ok());
            let ell = ell.unwrap();
            let r = validate(&ell, None).unwrap();
            if r.is_valid() {
                prop_assert!(r.triangle_inequalities_hold);
            }
        }
    }
}
