//! C ABI for `simplex-cone`.
//!
//! Every fallible function returns an [`ScStatus`]; on anything but
//! `SC_STATUS_OK` a message is available from [`sc_last_error`] on the same
//! thread. Simplices are passed around as opaque [`ScSimplex`] handles that
//! must be released with [`sc_simplex_free`]. Output arrays are caller-owned;
//! their required lengths are given per function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use simplex_cone::convexity;
use simplex_cone::dual;
use simplex_cone::extremal::{self, MaximizeOptions, Objective};
use simplex_cone::simplex::{self, edge_count, FaceId, SquaredEdgeLengths, Verdict};
use simplex_cone::Error;

/// Opaque squared-edge-length vector of an n-simplex.
pub struct ScSimplex(SquaredEdgeLengths);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// No simplex has these squared lengths.
    NotRealizable = 3,
    /// Iteration cap, failed line search or an ill-conditioned factorization.
    Numerical = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScVerdict {
    Valid = 0,
    Degenerate = 1,
    Invalid = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScObjectiveKind {
    /// Sum of the logs of all k-face volumes.
    LogProductFaces = 0,
    /// Sum of the k-th roots of all k-face volumes.
    SumRootFaces = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScValidity {
    pub verdict: ScVerdict,
    pub smallest_gram_eigenvalue: f64,
    pub largest_gram_eigenvalue: f64,
    pub threshold: f64,
    pub triangle_inequalities_hold: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScOptimizeResult {
    pub iterations: usize,
    pub objective: f64,
    pub regularity_deviation: f64,
    pub converged: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(ScStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::NotRealizable { .. } | Error::ProbeLeftCone { .. } | Error::ZeroFaceVolume { .. } => {
                ScStatus::NotRealizable
            }
            Error::NoConvergence { .. }
            | Error::MaxIterations(_)
            | Error::StepIntoInvalidRegion { .. }
            | Error::NotPositiveDefinite { .. }
            | Error::Singular
            | Error::NullityNotOne { .. }
            | Error::DegenerateFacet(_)
            | Error::NearZeroCofactor(_) => ScStatus::Numerical,
            _ => ScStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(ScStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ScStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            clear_error();
            ScStatus::Ok
        }
        Ok(Err(Fail(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            ScStatus::Panic
        }
    }
}

unsafe fn handle<'a>(h: *const ScSimplex) -> Result<&'a SquaredEdgeLengths, Fail> {
    h.as_ref().map(|s| &s.0).ok_or_else(|| null("simplex handle"))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_slice<'a>(p: *mut f64, len: usize, need: usize, what: &str) -> Result<&'a mut [f64], Fail> {
    if len < need {
        return Err(Fail(
            ScStatus::BufferTooSmall,
            format!("{what} needs {need} entries, got {len}"),
        ));
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, need))
}

unsafe fn write<T>(p: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

fn tolerance(tol: f64) -> Option<f64> {
    (tol > 0.0).then_some(tol)
}

fn boxed(ell: SquaredEdgeLengths) -> *mut ScSimplex {
    Box::into_raw(Box::new(ScSimplex(ell)))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn sc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Number of squared lengths of an n-simplex, `(n + 1) n / 2`.
#[no_mangle]
pub extern "C" fn sc_edge_count(n: usize) -> usize {
    edge_count(n)
}

/// Creates a simplex from `len` squared lengths in lexicographic edge order.
///
/// # Safety
/// `s` must point to `len` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_simplex_new(n: usize, s: *const f64, len: usize, out: *mut *mut ScSimplex) -> ScStatus {
    guard(|| {
        let values = slice(s, len, "squared lengths")?.to_vec();
        let ell = SquaredEdgeLengths::new(n, values)?;
        write(out, boxed(ell), "out")
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `h` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn sc_simplex_free(h: *mut ScSimplex) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Dimension n of the simplex, or 0 for a NULL handle.
///
/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sc_simplex_dimension(h: *const ScSimplex) -> usize {
    h.as_ref().map_or(0, |s| s.0.dim())
}

/// Copies the squared lengths into `out` (at least `sc_edge_count(n)` entries).
///
/// # Safety
/// `h` must be a live handle and `out` must hold `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sc_simplex_values(h: *const ScSimplex, out: *mut f64, len: usize) -> ScStatus {
    guard(|| {
        let ell = handle(h)?;
        out_slice(out, len, ell.values().len(), "out")?.copy_from_slice(ell.values());
        Ok(())
    })
}

/// Realizability verdict. `tol <= 0` selects the default tolerance.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_validate(h: *const ScSimplex, tol: f64, out: *mut ScValidity) -> ScStatus {
    guard(|| {
        let r = simplex::validate(handle(h)?, tolerance(tol))?;
        let verdict = match r.verdict {
            Verdict::Valid => ScVerdict::Valid,
            Verdict::Degenerate => ScVerdict::Degenerate,
            Verdict::Invalid => ScVerdict::Invalid,
        };
        write(
            out,
            ScValidity {
                verdict,
                smallest_gram_eigenvalue: r.smallest_gram_eigenvalue,
                largest_gram_eigenvalue: r.largest_gram_eigenvalue,
                threshold: r.threshold,
                triangle_inequalities_hold: r.triangle_inequalities_hold,
            },
            "out",
        )
    })
}

/// n-volume; 0 for degenerate input, `SC_STATUS_NOT_REALIZABLE` for invalid.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_volume(h: *const ScSimplex, out: *mut f64) -> ScStatus {
    guard(|| write(out, simplex::volume(handle(h)?)?, "out"))
}

/// Volume of the face spanned by `count` strictly increasing vertex indices.
///
/// # Safety
/// `h` must be a live handle, `vertices` must hold `count` indices and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_face_volume(
    h: *const ScSimplex,
    vertices: *const usize,
    count: usize,
    out: *mut f64,
) -> ScStatus {
    guard(|| {
        let face = FaceId::new(slice(vertices, count, "vertices")?.to_vec())?;
        write(out, simplex::face_volume(handle(h)?, &face)?, "out")
    })
}

/// Vertex coordinates, row-major `(n + 1) × n`, vertex 0 at the origin.
///
/// # Safety
/// `h` must be a live handle and `out` must hold `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sc_embed(h: *const ScSimplex, out: *mut f64, len: usize) -> ScStatus {
    guard(|| {
        let ell = handle(h)?;
        let n = ell.dim();
        let emb = simplex::embed(ell)?;
        let dst = out_slice(out, len, (n + 1) * n, "out")?;
        for (i, v) in emb.vertices().iter().enumerate() {
            dst[i * n..(i + 1) * n].copy_from_slice(v);
        }
        Ok(())
    })
}

/// Dual Gram matrix (row-major `(n + 1) × (n + 1)`) and facet areas
/// (`n + 1` entries, `areas[i]` opposite vertex `i`).
///
/// # Safety
/// `h` must be a live handle; `gstar` and `areas` must hold `gstar_len` and
/// `areas_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sc_dual_gram(
    h: *const ScSimplex,
    gstar: *mut f64,
    gstar_len: usize,
    areas: *mut f64,
    areas_len: usize,
) -> ScStatus {
    guard(|| {
        let ell = handle(h)?;
        let m = ell.dim() + 1;
        let g = out_slice(gstar, gstar_len, m * m, "gstar")?;
        let a = out_slice(areas, areas_len, m, "areas")?;
        let r = dual::dual_gram(ell)?;
        g.copy_from_slice(r.gstar.as_slice());
        a.copy_from_slice(&r.areas);
        Ok(())
    })
}

/// `adj(G*)_ii / adj(G*)_jj`, the squared ratio of the facet areas.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_area_ratio(h: *const ScSimplex, i: usize, j: usize, out: *mut f64) -> ScStatus {
    guard(|| write(out, dual::area_ratio_from_adjugate(handle(h)?, i, j)?, "out"))
}

/// New handle holding `t1·a + t2·b`.
///
/// # Safety
/// `a`, `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_cone_combine(
    a: *const ScSimplex,
    b: *const ScSimplex,
    t1: f64,
    t2: f64,
    out: *mut *mut ScSimplex,
) -> ScStatus {
    guard(|| {
        let c = convexity::cone_combine(handle(a)?, handle(b)?, t1, t2)?;
        write(out, boxed(c), "out")
    })
}

/// Maximizes the chosen face functional over `Σ s_e = total` from a seeded
/// random start. On success `out_point` receives a new handle with the final
/// point.
///
/// # Safety
/// `out_point` and `out_result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_maximize(
    n: usize,
    total: f64,
    kind: ScObjectiveKind,
    k: usize,
    seed: u64,
    out_point: *mut *mut ScSimplex,
    out_result: *mut ScOptimizeResult,
) -> ScStatus {
    guard(|| {
        if out_point.is_null() {
            return Err(null("out_point"));
        }
        if out_result.is_null() {
            return Err(null("out_result"));
        }
        let obj = match kind {
            ScObjectiveKind::LogProductFaces => Objective::log_product(k),
            ScObjectiveKind::SumRootFaces => Objective::sum_root(k),
        };
        let opts = MaximizeOptions {
            seed,
            ..Default::default()
        };
        let trace = extremal::maximize(n, total, &obj, &opts)?;
        let result = ScOptimizeResult {
            iterations: trace.iterations(),
            objective: trace.final_objective(),
            regularity_deviation: trace.regularity_deviation,
            converged: trace.converged,
        };
        write(out_result, result, "out_result")?;
        write(out_point, boxed(trace.final_point), "out_point")
    })
}
