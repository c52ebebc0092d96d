//! Convexity checks on the squared-length cone.
//!
//! Positive combinations of valid squared-length vectors stay valid, face
//! volumes are log-concave along cone segments, and the n-th root of the
//! volume is concave. The two counterexample families show what goes wrong
//! when one works with plain lengths instead.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, SymMatrix};
use crate::simplex::{self, FaceId, SquaredEdgeLengths, ValidityReport};

/// Componentwise `t1·s1 + t2·s2`.
pub fn cone_combine(
    ell1: &SquaredEdgeLengths,
    ell2: &SquaredEdgeLengths,
    t1: f64,
    t2: f64,
) -> Result<SquaredEdgeLengths> {
    if ell1.dim() != ell2.dim() {
        return Err(Error::DimensionMismatch {
            left: ell1.dim(),
            right: ell2.dim(),
        });
    }
    if !(t1 >= 0.0 && t2 >= 0.0 && t1 + t2 > 0.0) || !t1.is_finite() || !t2.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "cone weights must be nonnegative with positive sum, got ({t1}, {t2})"
        )));
    }
    let s = ell1
        .values()
        .iter()
        .zip(ell2.values())
        .map(|(a, b)| t1 * a + t2 * b)
        .collect();
    SquaredEdgeLengths::new(ell1.dim(), s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CounterexampleKind {
    /// Triangle inequalities hold on every triple, yet no simplex exists.
    NonSufficiency,
    /// Two valid simplices whose edge-length sum is not a simplex.
    NonConvexity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexamplePiece {
    pub name: String,
    pub squared_lengths: SquaredEdgeLengths,
    pub report: ValidityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleInstance {
    pub label: CounterexampleKind,
    pub epsilon: f64,
    pub pieces: Vec<CounterexamplePiece>,
}

impl CounterexampleInstance {
    pub fn piece(&self, name: &str) -> Option<&CounterexamplePiece> {
        self.pieces.iter().find(|p| p.name == name)
    }
}

fn piece(name: &str, squared_lengths: SquaredEdgeLengths) -> Result<CounterexamplePiece> {
    let report = simplex::validate(&squared_lengths, None)?;
    Ok(CounterexamplePiece {
        name: name.to_string(),
        squared_lengths,
        report,
    })
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveEpsilon(epsilon))
    }
}

/// Unit equilateral base `{1, 2, 3}` with apex 0 at distance `1/2 + ε` from
/// each base vertex.
pub fn nontri_lengths(epsilon: f64) -> Result<SquaredEdgeLengths> {
    check_epsilon(epsilon)?;
    let apex = (0.5 + epsilon) * (0.5 + epsilon);
    SquaredEdgeLengths::new(3, vec![apex, apex, apex, 1.0, 1.0, 1.0])
}

pub fn nontri_instance(epsilon: f64) -> Result<CounterexampleInstance> {
    Ok(CounterexampleInstance {
        label: CounterexampleKind::NonSufficiency,
        epsilon,
        pieces: vec![piece("simplex", nontri_lengths(epsilon)?)?],
    })
}

/// Bisects `ε ↦ λ_min(G(ε))` on `[lo, hi]` for its sign change.
fn bisect_sign_change(
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    f: impl Fn(f64) -> Result<f64>,
) -> Result<f64> {
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::InvalidArgument(format!(
            "no sign change on [{lo}, {hi}]: {f_lo:e} vs {f_hi:e}"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid)?.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn smallest_gram_eigenvalue(ell: &SquaredEdgeLengths) -> Result<f64> {
    linalg::smallest_eigenvalue(&simplex::gram_from_squared_lengths(ell))
}

/// The ε where the apex family becomes realizable, searched on `[lo, hi]`.
pub fn nontri_threshold(lo: f64, hi: f64, tol: f64) -> Result<f64> {
    bisect_sign_change(lo, hi, tol, |e| smallest_gram_eigenvalue(&nontri_lengths(e)?))
}

/// The pair `A`, `B` of the length non-convexity example: unit spokes from
/// vertex 0, one short edge `ε` (on `{1,2}` for `A`, on `{1,3}` for `B`),
/// the other two base edges `√2`.
pub fn frankel_pair(epsilon: f64) -> Result<(SquaredEdgeLengths, SquaredEdgeLengths)> {
    check_epsilon(epsilon)?;
    let e2 = epsilon * epsilon;
    // order: 01 02 03 12 13 23
    let a = SquaredEdgeLengths::new(3, vec![1.0, 1.0, 1.0, e2, 2.0, 2.0])?;
    let b = SquaredEdgeLengths::new(3, vec![1.0, 1.0, 1.0, 2.0, e2, 2.0])?;
    Ok((a, b))
}

/// Squares of `l(A) + l(B)`, edge by edge.
pub fn length_sum(a: &SquaredEdgeLengths, b: &SquaredEdgeLengths) -> Result<SquaredEdgeLengths> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let s = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| {
            let l = x.sqrt() + y.sqrt();
            l * l
        })
        .collect();
    SquaredEdgeLengths::new(a.dim(), s)
}

/// Pieces `A`, `B`, `C_lengths` (lengths added) and `A+B_squared`
/// (squared lengths added).
pub fn frankel_instance(epsilon: f64) -> Result<CounterexampleInstance> {
    let (a, b) = frankel_pair(epsilon)?;
    let c = length_sum(&a, &b)?;
    let cone = cone_combine(&a, &b, 1.0, 1.0)?;
    Ok(CounterexampleInstance {
        label: CounterexampleKind::NonConvexity,
        epsilon,
        pieces: vec![
            piece("A", a)?,
            piece("B", b)?,
            piece("C_lengths", c)?,
            piece("A+B_squared", cone)?,
        ],
    })
}

/// The ε where the length sum `C` becomes realizable, searched on `[lo, hi]`.
pub fn frankel_threshold(lo: f64, hi: f64, tol: f64) -> Result<f64> {
    bisect_sign_change(lo, hi, tol, |e| {
        let (a, b) = frankel_pair(e)?;
        smallest_gram_eigenvalue(&length_sum(&a, &b)?)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProbeMode {
    /// `log vol(f)`.
    Log,
    /// `vol(f)^(1/k)` for a k-face.
    Root,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcavityProbeReport {
    pub samples: usize,
    /// Smallest `g(mid) - (g(x) + g(y)) / 2` over symmetric sample triples.
    pub worst_midpoint_defect: f64,
    /// Smallest `-(g[i+1] - 2 g[i] + g[i-1])`; concavity makes it nonnegative.
    pub worst_second_difference: f64,
    /// Largest analytic `g''(t)` over the samples.
    pub worst_analytic_second_derivative: f64,
    pub passed: bool,
}

const MIDPOINT_SLACK: f64 = 1e-10;
const SECOND_DIFFERENCE_SLACK: f64 = 1e-8;
const ANALYTIC_SLACK: f64 = 1e-12;

/// Samples `g(t)` on the segment `(1-t)·ell1 + t·ell2`, `t ∈ [0, 1]`.
///
/// The analytic second derivative comes from
/// `d²/dt² log det(G + tΔG) = -tr(G⁻¹ΔG G⁻¹ΔG)` with `ΔG` the difference of
/// the two face Gram matrices; the sampled differences are a cross-check.
pub fn probe_concavity(
    ell1: &SquaredEdgeLengths,
    ell2: &SquaredEdgeLengths,
    face: &FaceId,
    mode: ProbeMode,
    samples: usize,
) -> Result<ConcavityProbeReport> {
    if samples < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 samples, got {samples}"
        )));
    }
    if ell1.dim() != ell2.dim() {
        return Err(Error::DimensionMismatch {
            left: ell1.dim(),
            right: ell2.dim(),
        });
    }
    let k = face.dim() as f64;
    let g1 = simplex::gram_from_squared_lengths(&simplex::face_squared_lengths(ell1, face)?);
    let g2 = simplex::gram_from_squared_lengths(&simplex::face_squared_lengths(ell2, face)?);
    let delta = g2.sub(&g1);

    let h = 1.0 / (samples - 1) as f64;
    let mut values = Vec::with_capacity(samples);
    let mut worst_analytic = f64::NEG_INFINITY;
    for i in 0..samples {
        let t = i as f64 * h;
        let point = cone_combine(ell1, ell2, 1.0 - t, t)?;
        let face_lengths = simplex::face_squared_lengths(&point, face)?;
        if !simplex::validate(&face_lengths, None)?.is_valid() {
            return Err(Error::ProbeLeftCone { t });
        }
        let vol = simplex::volume(&face_lengths)?;
        let gram = simplex::gram_from_squared_lengths(&face_lengths);
        let (g, d2) = match mode {
            ProbeMode::Log => (vol.ln(), 0.5 * linalg::logdet_second_derivative(&gram, &delta)?),
            ProbeMode::Root => {
                let g = vol.powf(1.0 / k);
                (g, root_second_derivative(g, k, &gram, &delta)?)
            }
        };
        worst_analytic = worst_analytic.max(d2);
        values.push(g);
    }

    let mut passed = worst_analytic <= ANALYTIC_SLACK;
    let mut worst_mid = f64::INFINITY;
    for c in 1..samples - 1 {
        for r in 1..=c.min(samples - 1 - c) {
            let defect = values[c] - 0.5 * (values[c - r] + values[c + r]);
            worst_mid = worst_mid.min(defect);
            if defect < -MIDPOINT_SLACK * values[c].abs().max(1.0) {
                passed = false;
            }
        }
    }
    let worst_second = values
        .windows(3)
        .map(|w| -(w[2] - 2.0 * w[1] + w[0]))
        .fold(f64::INFINITY, f64::min);
    if worst_second < -SECOND_DIFFERENCE_SLACK * h * h {
        passed = false;
    }
    Ok(ConcavityProbeReport {
        samples,
        worst_midpoint_defect: worst_mid,
        worst_second_difference: worst_second,
        worst_analytic_second_derivative: worst_analytic,
        passed,
    })
}

// g = c·det(G)^(1/2k): g'' = g·(φ''/2k + (φ'/2k)²) with φ = log det.
fn root_second_derivative(g: f64, k: f64, gram: &SymMatrix, delta: &SymMatrix) -> Result<f64> {
    let d1 = linalg::logdet_directional_derivative(gram, delta)? / (2.0 * k);
    let d2 = linalg::logdet_second_derivative(gram, delta)? / (2.0 * k);
    Ok(g * (d2 + d1 * d1))
}

pub fn probe_log_concavity(
    ell1: &SquaredEdgeLengths,
    ell2: &SquaredEdgeLengths,
    f: &FaceId,
    samples: usize,
) -> Result<ConcavityProbeReport> {
    probe_concavity(ell1, ell2, f, ProbeMode::Log, samples)
}

/// Concavity of `vol^(1/n)` for the whole simplex.
pub fn probe_root_concavity(
    ell1: &SquaredEdgeLengths,
    ell2: &SquaredEdgeLengths,
    samples: usize,
) -> Result<ConcavityProbeReport> {
    probe_concavity(ell1, ell2, &FaceId::full(ell1.dim()), ProbeMode::Root, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::{gram_from_squared_lengths, regular_simplex, right_corner_simplex, validate, Verdict};

    #[test]
    fn cone_combine_basics() {
        let ell = regular_simplex(3, 6.0).unwrap();
        let twice = cone_combine(&ell, &ell, 1.0, 1.0).unwrap();
        assert_eq!(twice.values(), &[2.0; 6]);
        assert!(validate(&twice, None).unwrap().is_valid());

        let mid = cone_combine(&ell, &right_corner_simplex(3).unwrap(), 0.5, 0.5).unwrap();
        assert!(validate(&mid, None).unwrap().is_valid());

        assert!(cone_combine(&ell, &regular_simplex(2, 1.0).unwrap(), 1.0, 1.0).is_err());
        assert!(cone_combine(&ell, &ell, 0.0, 0.0).is_err());
        assert!(cone_combine(&ell, &ell, -1.0, 2.0).is_err());
    }

    #[test]
    fn gram_is_additive() {
        let x = SquaredEdgeLengths::new(3, vec![1.0, 1.5, 2.0, 1.25, 2.5, 1.75]).unwrap();
        let y = right_corner_simplex(3).unwrap();
        let c = cone_combine(&x, &y, 0.25, 2.0).unwrap();
        let lhs = gram_from_squared_lengths(&c);
        let rhs = gram_from_squared_lengths(&x).scale(0.25).add(&gram_from_squared_lengths(&y).scale(2.0));
        // Dyadic weights and values: every step is exact.
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn nontri_examples() {
        let inst = nontri_instance(0.01).unwrap();
        let p = inst.piece("simplex").unwrap();
        assert_eq!(p.report.verdict, Verdict::Invalid);
        assert!(p.report.triangle_inequalities_hold);

        let inst = nontri_instance(0.2).unwrap();
        assert_eq!(inst.pieces[0].report.verdict, Verdict::Valid);

        assert!(matches!(nontri_instance(0.0), Err(Error::NonPositiveEpsilon(_))));
        assert!(nontri_instance(-0.1).is_err());
    }

    #[test]
    fn nontri_threshold_is_circumradius() {
        let eps = nontri_threshold(1e-6, 0.2, 1e-10).unwrap();
        let expected = 1.0 / 3f64.sqrt() - 0.5;
        assert!((eps - expected).abs() < 1e-9, "{eps} vs {expected}");
    }

    #[test]
    fn frankel_small_epsilon() {
        let inst = frankel_instance(0.01).unwrap();
        assert_eq!(inst.piece("A").unwrap().report.verdict, Verdict::Valid);
        assert_eq!(inst.piece("B").unwrap().report.verdict, Verdict::Valid);
        assert_eq!(inst.piece("C_lengths").unwrap().report.verdict, Verdict::Invalid);
        assert_eq!(inst.piece("A+B_squared").unwrap().report.verdict, Verdict::Valid);
        assert!(frankel_instance(0.0).is_err());
    }

    // C is isosceles on {1,2,3} with spokes 2 from vertex 0; it is realizable
    // once the base circumradius drops below 2, i.e. (√2+ε)² = 8 - 4√2.
    #[test]
    fn frankel_threshold_matches_circumradius() {
        let eps = frankel_threshold(0.01, 1.9, 1e-12).unwrap();
        let expected = 2.0 * (2.0 - 2f64.sqrt()).sqrt() - 2f64.sqrt();
        assert!((eps - expected).abs() < 1e-10, "{eps} vs {expected}");
        assert!((eps - 0.116520167087264).abs() < 1e-12);
    }

    #[test]
    fn frankel_pieces_degenerate_at_two() {
        let (a, _) = frankel_pair(2.0).unwrap();
        assert_eq!(validate(&a, None).unwrap().verdict, Verdict::Degenerate);
        let (a, _) = frankel_pair(2.5).unwrap();
        assert!(!validate(&a, None).unwrap().triangle_inequalities_hold);
    }

    #[test]
    fn probe_flat_segment() {
        let ell = SquaredEdgeLengths::new(3, vec![1.0, 1.5, 2.0, 1.25, 2.5, 1.75]).unwrap();
        let r = probe_log_concavity(&ell, &ell, &FaceId::full(3), 21).unwrap();
        assert!(r.passed);
        assert!(r.worst_second_difference.abs() < 1e-12);
        let r = probe_root_concavity(&ell, &ell, 21).unwrap();
        assert!(r.passed);
        assert!(r.worst_second_difference.abs() < 1e-12);
    }

    #[test]
    fn probe_regular_vs_right_corner() {
        let a = regular_simplex(3, 6.0).unwrap();
        let b = right_corner_simplex(3).unwrap();
        let r = probe_log_concavity(&a, &b, &FaceId::full(3), 101).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.worst_analytic_second_derivative <= 1e-12);
        for f in crate::simplex::k_faces(3, 2) {
            assert!(probe_log_concavity(&a, &b, &f, 51).unwrap().passed);
            assert!(probe_concavity(&a, &b, &f, ProbeMode::Root, 51).unwrap().passed);
        }
    }

    // Along t ↦ (1-t)·s + t·τ·s the root of the volume is c·√(1 - t + tτ).
    #[test]
    fn probe_root_scaled_copy_matches_closed_form() {
        let a = regular_simplex(3, 6.0).unwrap();
        let tau = 4.0;
        let b = a.scaled(tau).unwrap();
        let r = probe_root_concavity(&a, &b, 11).unwrap();
        assert!(r.passed);
        let c = simplex::volume(&a).unwrap().powf(1.0 / 3.0);
        // g(t) = c·(1 - t + tτ)^(1/2); g'' = -c(τ-1)²/4 · (…)^(-3/2), largest at t = 1.
        let expected = -c * (tau - 1.0) * (tau - 1.0) / 4.0 * tau.powf(-1.5);
        assert!((r.worst_analytic_second_derivative - expected).abs() < 1e-12);
    }

    #[test]
    fn probe_rejects_bad_arguments() {
        let a = regular_simplex(3, 6.0).unwrap();
        assert!(probe_root_concavity(&a, &a, 2).is_err());
        let bad = nontri_lengths(0.01).unwrap();
        assert!(matches!(
            probe_log_concavity(&a, &bad, &FaceId::full(3), 11),
            Err(Error::ProbeLeftCone { .. })
        ));
    }
}
