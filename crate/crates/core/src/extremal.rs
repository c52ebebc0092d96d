//! Face-volume functionals and their maximization at fixed total squared length.
//!
//! `P_k` is the product of the volumes of all k-faces (handled through its
//! logarithm) and `S_k` the sum of their k-th roots. Both are concave on the
//! squared-length cone and invariant under relabeling, so on the slice
//! `Σ s_e = a` they peak at the regular simplex.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, SymMatrix};
use crate::simplex::{self, edge_count, edge_index, FaceId, SquaredEdgeLengths, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ObjectiveKind {
    /// `Σ_f log vol(f)`, the log of `P_k`.
    LogProductFaces,
    /// `Σ_f vol(f)^(1/k)`.
    SumRootFaces,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Objective {
    pub kind: ObjectiveKind,
    pub k: usize,
}

impl Objective {
    pub fn log_product(k: usize) -> Self {
        Objective {
            kind: ObjectiveKind::LogProductFaces,
            k,
        }
    }

    pub fn sum_root(k: usize) -> Self {
        Objective {
            kind: ObjectiveKind::SumRootFaces,
            k,
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        if (1..=n).contains(&self.k) {
            Ok(())
        } else {
            Err(Error::BadObjective { k: self.k, n })
        }
    }
}

fn require_valid(ell: &SquaredEdgeLengths) -> Result<()> {
    let report = simplex::validate(ell, None)?;
    if report.is_valid() {
        Ok(())
    } else {
        Err(Error::NotRealizable {
            smallest_eigenvalue: report.smallest_gram_eigenvalue,
        })
    }
}

/// `∂ log vol / ∂ s_e = ½ tr(G⁻¹ ∂G/∂s_e)`, in lexicographic edge order.
///
/// For `e = (0, k)` this is half the `k`-th row sum of `G⁻¹`; for `e = (i, j)`
/// with `i, j ≥ 1` it is `-½ (G⁻¹)_ij`.
pub fn gradient_log_volume(ell: &SquaredEdgeLengths) -> Result<Vec<f64>> {
    require_valid(ell)?;
    let n = ell.dim();
    let l = linalg::cholesky_factor(&simplex::gram_from_squared_lengths(ell))?;
    let inv = linalg::inverse_from_cholesky(&l);
    Ok(ell
        .edges()
        .map(|(i, j)| {
            if i == 0 {
                0.5 * (0..n).map(|c| inv[(j - 1, c)]).sum::<f64>()
            } else {
                -0.5 * inv[(i - 1, j - 1)]
            }
        })
        .collect())
}

struct FaceData {
    face: FaceId,
    lengths: SquaredEdgeLengths,
    volume: f64,
}

fn faces(ell: &SquaredEdgeLengths, obj: &Objective) -> Result<Vec<FaceData>> {
    let n = ell.dim();
    obj.check(n)?;
    require_valid(ell)?;
    simplex::k_faces(n, obj.k)
        .into_iter()
        .map(|face| {
            let lengths = simplex::face_squared_lengths(ell, &face)?;
            let volume = simplex::volume(&lengths)?;
            if !(volume > 0.0) {
                return Err(Error::ZeroFaceVolume { k: obj.k });
            }
            Ok(FaceData {
                face,
                lengths,
                volume,
            })
        })
        .collect()
}

pub fn objective_value(ell: &SquaredEdgeLengths, obj: &Objective) -> Result<f64> {
    let k = obj.k as f64;
    Ok(faces(ell, obj)?
        .iter()
        .map(|f| match obj.kind {
            ObjectiveKind::LogProductFaces => f.volume.ln(),
            ObjectiveKind::SumRootFaces => f.volume.powf(1.0 / k),
        })
        .sum())
}

pub fn objective_gradient(ell: &SquaredEdgeLengths, obj: &Objective) -> Result<Vec<f64>> {
    let n = ell.dim();
    let k = obj.k as f64;
    let mut grad = vec![0.0; edge_count(n)];
    for f in faces(ell, obj)? {
        let weight = match obj.kind {
            ObjectiveKind::LogProductFaces => 1.0,
            ObjectiveKind::SumRootFaces => f.volume.powf(1.0 / k) / k,
        };
        let local = gradient_log_volume(&f.lengths)?;
        let vs = f.face.vertices();
        for ((a, b), g) in f.lengths.edges().zip(local) {
            grad[edge_index(n, vs[a], vs[b])] += weight * g;
        }
    }
    Ok(grad)
}

/// `objective(to) - objective(from)` computed face by face without cancellation.
pub fn objective_increment(
    from: &SquaredEdgeLengths,
    to: &SquaredEdgeLengths,
    obj: &Objective,
) -> Result<f64> {
    if from.dim() != to.dim() {
        return Err(Error::DimensionMismatch {
            left: from.dim(),
            right: to.dim(),
        });
    }
    require_valid(to)?;
    let delta: Vec<f64> = to.values().iter().zip(from.values()).map(|(b, a)| b - a).collect();
    increment_along(from, &delta, obj)
}

/// Change of the objective from `from` to `from + delta`.
///
/// With `G = L Lᵀ` for a face at `from` and `E = L⁻¹ ΔG L⁻ᵀ`, where `ΔG` is
/// the polarization of `delta` restricted to the face, the change of
/// `log vol` is `½ Σ log1p(μ)` over the eigenvalues `μ` of `E`.
fn increment_along(from: &SquaredEdgeLengths, delta: &[f64], obj: &Objective) -> Result<f64> {
    let n = from.dim();
    let k = obj.k as f64;
    let mut total = 0.0;
    for f in faces(from, obj)? {
        let g = simplex::gram_from_squared_lengths(&f.lengths);
        let vs = f.face.vertices();
        let d = |i: usize, j: usize| delta[edge_index(n, vs[i], vs[j])];
        let dg = SymMatrix::from_upper(g.size(), |i, j| {
            if i == j {
                d(0, i + 1)
            } else {
                0.5 * (d(0, i + 1) + d(0, j + 1) - d(i + 1, j + 1))
            }
        });
        let l = linalg::cholesky_factor(&g)?;
        let e = congruence_inverse(&l, &dg);
        let mu = linalg::eigendecompose(&e)?.eigenvalues;
        if mu.iter().any(|&m| !(m > -1.0)) {
            return Err(Error::ZeroFaceVolume { k: obj.k });
        }
        let dlog = 0.5 * mu.iter().map(|m| m.ln_1p()).sum::<f64>();
        total += match obj.kind {
            ObjectiveKind::LogProductFaces => dlog,
            ObjectiveKind::SumRootFaces => f.volume.powf(1.0 / k) * (dlog / k).exp_m1(),
        };
    }
    Ok(total)
}

// L⁻¹ D L⁻ᵀ for symmetric D.
fn congruence_inverse(l: &Matrix, d: &SymMatrix) -> SymMatrix {
    let size = l.rows();
    let x: Vec<Vec<f64>> = (0..size).map(|c| linalg::solve_lower(l, &d.column(c))).collect();
    // x[c] is column c of L⁻¹D; column c of (L⁻¹D)ᵀ is its row c.
    let y: Vec<Vec<f64>> = (0..size)
        .map(|c| {
            let row: Vec<f64> = x.iter().map(|col| col[c]).collect();
            linalg::solve_lower(l, &row)
        })
        .collect();
    SymMatrix::from_upper(size, |i, j| 0.5 * (y[i][j] + y[j][i]))
}

/// A random point of `{Σ s_e = total, Valid}`: squared distances between
/// `n + 1` points drawn uniformly from a cube, rescaled.
pub fn random_feasible_point<R: Rng + ?Sized>(n: usize, total: f64, rng: &mut R) -> Result<SquaredEdgeLengths> {
    if n == 0 || !(total > 0.0 && total.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need n >= 1 and a positive total, got n = {n}, total = {total}"
        )));
    }
    loop {
        let points: Vec<Vec<f64>> = (0..=n)
            .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let ell = SquaredEdgeLengths::from_points(&points)?;
        let ell = ell.scaled(total / ell.total())?;
        if simplex::validate(&ell, None)?.is_valid() {
            return Ok(ell);
        }
    }
}

/// Smallest `λ_min / λ_max` of the Gram matrix accepted for a random start.
pub const START_CONDITION_FLOOR: f64 = 1e-2;

/// Like [`random_feasible_point`], but keeps drawing until the Gram matrix
/// has `λ_min / λ_max ≥` [`START_CONDITION_FLOOR`].
pub fn random_interior_point<R: Rng + ?Sized>(n: usize, total: f64, rng: &mut R) -> Result<SquaredEdgeLengths> {
    loop {
        let ell = random_feasible_point(n, total, rng)?;
        let r = simplex::validate(&ell, None)?;
        if r.smallest_gram_eigenvalue >= START_CONDITION_FLOOR * r.largest_gram_eigenvalue {
            return Ok(ell);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximizeOptions {
    /// Starting point; rescaled onto the slice `Σ s_e = a`. Drawn with
    /// [`random_interior_point`] if absent.
    pub start: Option<Vec<f64>>,
    pub seed: u64,
    /// Convergence when the projected gradient norm drops below
    /// `gtol · (1 + |objective|)`.
    pub gtol: f64,
    pub max_iterations: usize,
    /// Defaults to `0.1 · a / C(n+1, 2)`.
    pub initial_step: Option<f64>,
    pub armijo: f64,
    pub max_backtracks: usize,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        MaximizeOptions {
            start: None,
            seed: 0,
            gtol: 1e-10,
            max_iterations: 10_000,
            initial_step: None,
            armijo: 1e-4,
            max_backtracks: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Iterate {
    pub s: Vec<f64>,
    pub objective: f64,
    pub gradient_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationTrace {
    pub objective: Objective,
    pub total: f64,
    pub iterates: Vec<Iterate>,
    pub final_point: SquaredEdgeLengths,
    pub regularity_deviation: f64,
    pub converged: bool,
}

impl OptimizationTrace {
    pub fn iterations(&self) -> usize {
        self.iterates.len() - 1
    }

    pub fn final_objective(&self) -> f64 {
        self.iterates.last().expect("at least the start").objective
    }
}

/// `max_e |s_e - mean| / mean`.
pub fn regularity_deviation(ell: &SquaredEdgeLengths) -> f64 {
    let mean = ell.total() / ell.values().len() as f64;
    ell.values()
        .iter()
        .map(|s| (s - mean).abs())
        .fold(0.0, f64::max)
        / mean
}

// Mean removal; apply twice to clear the rounding residual of the first pass.
fn center(v: &[f64]) -> Vec<f64> {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| x - mean).collect()
}

fn project_to_slice(s: &mut [f64], total: f64) {
    let shift = (total - s.iter().sum::<f64>()) / s.len() as f64;
    s.iter_mut().for_each(|x| *x += shift);
}

/// Projected gradient ascent of `obj` on `{Σ s_e = a, Valid}` with a
/// backtracking Armijo line search that refuses any non-Valid trial point.
///
/// Recorded objective values are the start value plus the increments along
/// the accepted steps `step · d`, which stay resolvable after the stored
/// points stop changing in the last bits.
pub fn maximize(n: usize, a: f64, obj: &Objective, opts: &MaximizeOptions) -> Result<OptimizationTrace> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need n >= 2, got {n}")));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidArgument(format!("total must be positive, got {a}")));
    }
    obj.check(n)?;
    let m = edge_count(n);
    let start = match &opts.start {
        Some(s) => {
            let ell = SquaredEdgeLengths::new(n, s.clone())?;
            let ell = ell.scaled(a / ell.total())?;
            let mut s = ell.into_values();
            project_to_slice(&mut s, a);
            SquaredEdgeLengths::new(n, s)?
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let mut s = random_interior_point(n, a, &mut rng)?.into_values();
            project_to_slice(&mut s, a);
            SquaredEdgeLengths::new(n, s)?
        }
    };

    let mut current = start;
    let mut value = objective_value(&current, obj)?;
    let mut step = opts.initial_step.unwrap_or(0.1 * a / m as f64);
    let mut iterates = Vec::new();

    for iteration in 0..=opts.max_iterations {
        let grad = objective_gradient(&current, obj)?;
        let direction = center(&center(&grad));
        let gnorm = linalg::norm(&direction);
        iterates.push(Iterate {
            s: current.values().to_vec(),
            objective: value,
            gradient_norm: gnorm,
        });
        if gnorm < opts.gtol * (1.0 + value.abs()) {
            return Ok(OptimizationTrace {
                objective: *obj,
                total: a,
                regularity_deviation: regularity_deviation(&current),
                final_point: current,
                iterates,
                converged: true,
            });
        }
        if iteration == opts.max_iterations {
            break;
        }

        let mut accepted = None;
        for _ in 0..opts.max_backtracks {
            let mut trial: Vec<f64> = current
                .values()
                .iter()
                .zip(&direction)
                .map(|(s, d)| s + step * d)
                .collect();
            project_to_slice(&mut trial, a);
            if let Ok(trial) = SquaredEdgeLengths::new(n, trial) {
                if simplex::validate(&trial, None)?.verdict == Verdict::Valid {
                    let displacement: Vec<f64> = direction.iter().map(|d| step * d).collect();
                    let gain = increment_along(&current, &displacement, obj)?;
                    if gain >= opts.armijo * step * gnorm * gnorm {
                        accepted = Some((trial, gain));
                        break;
                    }
                }
            }
            step *= 0.5;
        }
        let Some((next, gain)) = accepted else {
            return Err(Error::StepIntoInvalidRegion { iteration });
        };
        current = next;
        value += gain;
        step *= 2.0;
    }
    Err(Error::MaxIterations(opts.max_iterations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::{regular_simplex, right_corner_simplex};

    fn fd_check(ell: &SquaredEdgeLengths, analytic: &[f64], f: impl Fn(&SquaredEdgeLengths) -> f64) {
        let n = ell.dim();
        for e in 0..ell.values().len() {
            let h = 1e-5 * ell.values()[e];
            let mut up = ell.values().to_vec();
            let mut down = up.clone();
            up[e] += h;
            down[e] -= h;
            let fd = (f(&SquaredEdgeLengths::new(n, up).unwrap()) - f(&SquaredEdgeLengths::new(n, down).unwrap())) / (2.0 * h);
            let scale = analytic.iter().map(|g| g.abs()).fold(0.0, f64::max);
            assert!((fd - analytic[e]).abs() <= 1e-6 * scale, "edge {e}: {fd} vs {}", analytic[e]);
        }
    }

    #[test]
    fn gradient_log_volume_regular_and_euler() {
        let g = gradient_log_volume(&regular_simplex(4, 10.0).unwrap()).unwrap();
        assert!(g.iter().all(|x| (x - g[0]).abs() < 1e-14));

        let ell = SquaredEdgeLengths::new(3, vec![1.0, 1.5, 2.0, 1.25, 2.5, 1.75]).unwrap();
        let g = gradient_log_volume(&ell).unwrap();
        let euler: f64 = g.iter().zip(ell.values()).map(|(a, b)| a * b).sum();
        assert!((euler - 1.5).abs() < 1e-13);
    }

    #[test]
    fn gradient_log_volume_finite_differences() {
        let ell = right_corner_simplex(2).unwrap();
        let g = gradient_log_volume(&ell).unwrap();
        fd_check(&ell, &g, |e| simplex::volume(e).unwrap().ln());
        // log vol = ½ log(s01 s02 - ((s01 + s02 - s12)/2)²) - log 2
        assert!((g[0] - 0.5).abs() < 1e-15);
        assert!((g[1] - 0.5).abs() < 1e-15);
        assert!(g[2].abs() < 1e-15);
    }

    #[test]
    fn objective_examples() {
        let tri = regular_simplex(2, 3.0).unwrap();
        assert!((objective_value(&tri, &Objective::sum_root(1)).unwrap() - 3.0).abs() < 1e-15);
        let v = objective_value(&tri, &Objective::log_product(2)).unwrap();
        assert!((v - (3f64.sqrt() / 4.0).ln()).abs() < 1e-15);
        let tet = regular_simplex(3, 6.0).unwrap();
        let v = objective_value(&tet, &Objective::sum_root(2)).unwrap();
        assert!((v - 4.0 * (3f64.sqrt() / 4.0).sqrt()).abs() < 1e-14);
        assert!((v - 2.6321).abs() < 1e-4);

        assert!(matches!(
            objective_value(&tet, &Objective::sum_root(4)),
            Err(Error::BadObjective { k: 4, n: 3 })
        ));
        assert!(objective_value(&tet, &Objective::sum_root(0)).is_err());
        let bad = SquaredEdgeLengths::new(2, vec![1.0, 1.0, 9.0]).unwrap();
        assert!(matches!(
            objective_value(&bad, &Objective::sum_root(1)),
            Err(Error::NotRealizable { .. })
        ));
    }

    #[test]
    fn objective_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=4 {
            let ell = random_feasible_point(n, 10.0, &mut rng).unwrap();
            for k in 1..=n {
                for obj in [Objective::log_product(k), Objective::sum_root(k)] {
                    let g = objective_gradient(&ell, &obj).unwrap();
                    fd_check(&ell, &g, |e| objective_value(e, &obj).unwrap());
                }
            }
            let g = objective_gradient(&ell, &Objective::log_product(n)).unwrap();
            let h = gradient_log_volume(&ell).unwrap();
            assert!(g.iter().zip(&h).all(|(a, b)| (a - b).abs() < 1e-15));
        }
    }

    #[test]
    fn increment_matches_difference() {
        let a = SquaredEdgeLengths::new(3, vec![1.0, 1.5, 2.0, 1.25, 2.5, 1.75]).unwrap();
        let b = regular_simplex(3, 10.0).unwrap();
        for obj in [Objective::log_product(2), Objective::sum_root(3), Objective::sum_root(1)] {
            let inc = objective_increment(&a, &b, &obj).unwrap();
            let diff = objective_value(&b, &obj).unwrap() - objective_value(&a, &obj).unwrap();
            assert!((inc - diff).abs() < 1e-13, "{inc} vs {diff}");
        }
    }

    #[test]
    fn maximize_triangle_from_given_start() {
        let opts = MaximizeOptions {
            start: Some(vec![1.5, 0.9, 0.6]),
            ..Default::default()
        };
        let trace = maximize(2, 3.0, &Objective::log_product(2), &opts).unwrap();
        assert!(trace.converged);
        assert!(trace.regularity_deviation < 1e-6);
        assert!(trace.final_point.values().iter().all(|s| (s - 1.0).abs() < 1e-6));
        assert!(trace.iterates.windows(2).all(|w| w[1].objective >= w[0].objective));
    }

    #[test]
    fn maximize_from_regular_start_stops_at_once() {
        let opts = MaximizeOptions {
            start: Some(vec![1.0; 6]),
            ..Default::default()
        };
        let trace = maximize(3, 6.0, &Objective::sum_root(2), &opts).unwrap();
        assert!(trace.iterations() <= 1);
        assert_eq!(trace.regularity_deviation, 0.0);
    }

    #[test]
    fn maximize_random_start_tetrahedron() {
        let opts = MaximizeOptions {
            seed: 3,
            ..Default::default()
        };
        let trace = maximize(3, 6.0, &Objective::sum_root(2), &opts).unwrap();
        assert!(trace.converged);
        assert!(trace.final_point.values().iter().all(|s| (s - 1.0).abs() < 1e-6));
        for it in &trace.iterates {
            assert!((it.s.iter().sum::<f64>() - 6.0).abs() <= 1e-12 * 6.0);
        }
    }

    #[test]
    fn maximize_rejects_bad_arguments() {
        let o = MaximizeOptions::default();
        assert!(maximize(1, 1.0, &Objective::log_product(1), &o).is_err());
        assert!(maximize(3, -1.0, &Objective::log_product(1), &o).is_err());
        assert!(matches!(
            maximize(3, 1.0, &Objective::log_product(5), &o),
            Err(Error::BadObjective { .. })
        ));
        let capped = MaximizeOptions {
            max_iterations: 2,
            seed: 5,
            ..Default::default()
        };
        assert!(matches!(
            maximize(4, 1.0, &Objective::log_product(4), &capped),
            Err(Error::MaxIterations(2))
        ));
    }
}
