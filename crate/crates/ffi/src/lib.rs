//! C ABI over `polya-cert`.
//!
//! Every function returns a [`PcStatus`] (or a plain value where nothing can
//! fail) and writes results through out-pointers. Objects are opaque handles
//! created by `pc_*_new`-style constructors and released with the matching
//! `pc_*_free`. On failure the message is kept per thread and can be read with
//! [`pc_last_error_message`]. Panics never cross the boundary; they surface as
//! [`PcStatus::Panic`].
//!
//! The header `include/polya_cert.h` is generated by the build script.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use polya_cert::bounds::{bound_values, convex_bound, verify_main_theorem, BoundReport, VerifyOptions};
use polya_cert::geometry::{ConvexPolygon, Point};
use polya_cert::lattice::{packing_points, PackingResult};
use polya_cert::special_functions::{bessel_j, bessel_zero, gamma_fn, j0_zero};
use polya_cert::spectrum::{pairs_for_lambda, NeumannSpectrum};
use polya_cert::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PcStatus {
    Ok = 0,
    NullPointer = 1,
    /// Argument outside the domain of the function.
    Domain = 2,
    InvalidPolygon = 3,
    Precondition = 4,
    Computation = 5,
    Range = 6,
    Mesh = 7,
    Solver = 8,
    /// A certified inequality failed numerically.
    Certificate = 9,
    Parse = 10,
    Panic = 11,
}

impl From<&Error> for PcStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => PcStatus::Domain,
            Error::InvalidPolygon(_) => PcStatus::InvalidPolygon,
            Error::Precondition(_) => PcStatus::Precondition,
            Error::Computation(_) => PcStatus::Computation,
            Error::Range(_) => PcStatus::Range,
            Error::Mesh(_) => PcStatus::Mesh,
            Error::Solver(_) => PcStatus::Solver,
            Error::Certificate(_) => PcStatus::Certificate,
            Error::Io(_) | Error::Json(_) => PcStatus::Parse,
        }
    }
}

/// Convex polygon handle.
pub struct PcPolygon(ConvexPolygon);
/// Neumann spectrum handle.
pub struct PcSpectrum(NeumannSpectrum);
/// Lattice packing handle.
pub struct PcPacking(PackingResult);

/// One verification row. `certificate` is NaN when `has_certificate` is false.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PcBoundReport {
    pub lambda: f64,
    pub area: f64,
    pub n_n: usize,
    pub bound_polya: f64,
    pub bound_kroger: f64,
    pub bound_convex: f64,
    pub packing_l: usize,
    pub certificate: f64,
    pub has_certificate: bool,
    pub pass: bool,
}

impl From<&BoundReport> for PcBoundReport {
    fn from(r: &BoundReport) -> Self {
        Self {
            lambda: r.lambda,
            area: r.area,
            n_n: r.n_n,
            bound_polya: r.polya,
            bound_kroger: r.kroger,
            bound_convex: r.convex,
            packing_l: r.packing_l,
            certificate: r.certificate.unwrap_or(f64::NAN),
            has_certificate: r.certificate.is_some(),
            pass: r.pass,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Failure(PcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(PcStatus::from(&e), e.to_string())
    }
}

type FfiResult = std::result::Result<(), Failure>;

fn null(what: &str) -> Failure {
    Failure(PcStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> FfiResult) -> PcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            PcStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            PcStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> FfiResult {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> std::result::Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes) and returns its full length in bytes. Pass a
/// null `buf` to query the length. The message is empty after a success.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn pc_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// `J_ν(t)` and `J_ν'(t)`.
///
/// # Safety
/// `out_j` and `out_dj` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pc_bessel_j(nu: f64, t: f64, out_j: *mut f64, out_dj: *mut f64) -> PcStatus {
    guard(|| {
        if out_j.is_null() || out_dj.is_null() {
            return Err(null("output"));
        }
        let (j, dj) = bessel_j(nu, t)?;
        write(out_j, j, "out_j")?;
        write(out_dj, dj, "out_dj")
    })
}

/// First positive zero of `J_ν`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pc_bessel_zero(nu: f64, out: *mut f64) -> PcStatus {
    guard(|| {
        let z = bessel_zero(nu)?;
        write(out, z, "out")
    })
}

/// First positive zero of `J₀`.
#[no_mangle]
pub extern "C" fn pc_j0_zero() -> f64 {
    j0_zero()
}

/// `Γ(x)` for `x > 0`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pc_gamma(x: f64, out: *mut f64) -> PcStatus {
    guard(|| {
        let g = gamma_fn(x)?;
        write(out, g, "out")
    })
}

/// Builds a convex polygon from `n_vertices` interleaved coordinates
/// `x0, y0, x1, y1, …` in counter-clockwise order.
///
/// # Safety
/// `xy` must be valid for `2 * n_vertices` reads and `out` for a write.
#[no_mangle]
pub unsafe extern "C" fn pc_polygon_new(xy: *const f64, n_vertices: usize, out: *mut *mut PcPolygon) -> PcStatus {
    guard(|| {
        if xy.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let coords = std::slice::from_raw_parts(xy, 2 * n_vertices);
        let vertices = coords.chunks_exact(2).map(|c| Point::new(c[0], c[1])).collect();
        let p = ConvexPolygon::new(vertices)?;
        write(out, Box::into_raw(Box::new(PcPolygon(p))), "out")
    })
}

/// Parses `{"vertices": [[x, y], ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pc_polygon_from_json(json: *const c_char, out: *mut *mut PcPolygon) -> PcStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(PcStatus::Parse, format!("domain JSON is not UTF-8: {e}")))?;
        let p = ConvexPolygon::from_json(text)?;
        write(out, Box::into_raw(Box::new(PcPolygon(p))), "out")
    })
}

/// # Safety
/// `p` must be null or a handle from a polygon constructor, freed once.
#[no_mangle]
pub unsafe extern "C" fn pc_polygon_free(p: *mut PcPolygon) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live polygon handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pc_polygon_area(p: *const PcPolygon, out: *mut f64) -> PcStatus {
    guard(|| {
        let p = deref(p, "polygon")?;
        write(out, p.0.area(), "out")
    })
}

/// Closed-set membership: boundary points count as inside.
///
/// # Safety
/// `p` must be a live polygon handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pc_polygon_contains(p: *const PcPolygon, x: f64, y: f64, out: *mut bool) -> PcStatus {
    guard(|| {
        let p = deref(p, "polygon")?;
        write(out, p.0.contains(Point::new(x, y)), "out")
    })
}

/// `|Ω|λ / (2√3 j₀²)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pc_convex_bound(area: f64, lambda: f64, out: *mut f64) -> PcStatus {
    guard(|| {
        let v = convex_bound(area, lambda)?;
        write(out, v, "out")
    })
}

/// Pólya and Kröger bounds in dimension `d`.
///
/// # Safety
/// `out_polya` and `out_kroger` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pc_bound_values(
    area: f64,
    lambda: f64,
    d: u32,
    out_polya: *mut f64,
    out_kroger: *mut f64,
) -> PcStatus {
    guard(|| {
        if out_polya.is_null() || out_kroger.is_null() {
            return Err(null("output"));
        }
        let (p, k) = bound_values(area, lambda, d)?;
        write(out_polya, p, "out_polya")?;
        write(out_kroger, k, "out_kroger")
    })
}

/// Packs a shifted triangular lattice of spacing `2r` into the polygon.
///
/// # Safety
/// `p` must be a live polygon handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pc_packing_new(p: *const PcPolygon, r: f64, out: *mut *mut PcPacking) -> PcStatus {
    guard(|| {
        let p = deref(p, "polygon")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let packing = packing_points(&p.0, r)?;
        write(out, Box::into_raw(Box::new(PcPacking(packing))), "out")
    })
}

/// Number of packed points; 0 for a null handle.
///
/// # Safety
/// `pk` must be null or a live packing handle.
#[no_mangle]
pub unsafe extern "C" fn pc_packing_len(pk: *const PcPacking) -> usize {
    pk.as_ref().map_or(0, |pk| pk.0.len())
}

/// `|Ω| / (2√3 r²)`, the count the packing is guaranteed to reach.
///
/// # Safety
/// `pk` must be a live packing handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pc_packing_guaranteed(pk: *const PcPacking, out: *mut f64) -> PcStatus {
    guard(|| {
        let pk = deref(pk, "packing")?;
        write(out, pk.0.guaranteed_min, "out")
    })
}

/// # Safety
/// `pk` must be a live packing handle; `out_x` and `out_y` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pc_packing_point(pk: *const PcPacking, i: usize, out_x: *mut f64, out_y: *mut f64) -> PcStatus {
    guard(|| {
        let pk = deref(pk, "packing")?;
        let pt = pk.0.points.get(i).ok_or_else(|| {
            Failure(PcStatus::Range, format!("point index {i} out of range for {} points", pk.0.len()))
        })?;
        if out_x.is_null() || out_y.is_null() {
            return Err(null("output"));
        }
        write(out_x, pt.x, "out_x")?;
        write(out_y, pt.y, "out_y")
    })
}

/// # Safety
/// `pk` must be null or a handle from [`pc_packing_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn pc_packing_free(pk: *mut PcPacking) {
    if !pk.is_null() {
        drop(Box::from_raw(pk));
    }
}

/// Closed-form spectrum of the `a × b` rectangle up to `cutoff`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pc_spectrum_rectangle(a: f64, b: f64, cutoff: f64, out: *mut *mut PcSpectrum) -> PcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let s = NeumannSpectrum::rectangle_analytic(a, b, cutoff)?;
        write(out, Box::into_raw(Box::new(PcSpectrum(s))), "out")
    })
}

/// FEM spectrum on a mesh of size `h` with `m` eigenvalues, or with enough
/// eigenvalues to be trusted up to `lambda` when `m` is 0.
///
/// # Safety
/// `p` must be a live polygon handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pc_spectrum_fem(
    p: *const PcPolygon,
    h: f64,
    m: usize,
    lambda: f64,
    out: *mut *mut PcSpectrum,
) -> PcStatus {
    guard(|| {
        let p = deref(p, "polygon")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let m = if m > 0 { m } else { pairs_for_lambda(&p.0, lambda) };
        let s = NeumannSpectrum::fem(&p.0, h, m)?;
        write(out, Box::into_raw(Box::new(PcSpectrum(s))), "out")
    })
}

/// Number of stored eigenvalues; 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn pc_spectrum_len(s: *const PcSpectrum) -> usize {
    s.as_ref().map_or(0, |s| s.0.len())
}

/// `μ_k`, 1-based.
///
/// # Safety
/// `s` must be a live spectrum handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pc_spectrum_mu(s: *const PcSpectrum, k: usize, out: *mut f64) -> PcStatus {
    guard(|| {
        let s = deref(s, "spectrum")?;
        let mu = s.0.mu(k).ok_or_else(|| Failure(PcStatus::Range, format!("no eigenvalue μ_{k} among {}", s.0.len())))?;
        write(out, mu, "out")
    })
}

/// `N_N(λ)`.
///
/// # Safety
/// `s` must be a live spectrum handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pc_spectrum_count(s: *const PcSpectrum, lambda: f64, out: *mut usize) -> PcStatus {
    guard(|| {
        let s = deref(s, "spectrum")?;
        let n = s.0.counting_function(lambda)?;
        write(out, n, "out")
    })
}

/// # Safety
/// `s` must be null or a handle from a spectrum constructor, freed once.
#[no_mangle]
pub unsafe extern "C" fn pc_spectrum_free(s: *mut PcSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Runs the full certificate at `λ` against `s`, with default quadrature.
///
/// # Safety
/// `p` and `s` must be live handles and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pc_verify(
    p: *const PcPolygon,
    lambda: f64,
    s: *const PcSpectrum,
    out: *mut PcBoundReport,
) -> PcStatus {
    guard(|| {
        let p = deref(p, "polygon")?;
        let s = deref(s, "spectrum")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let report = verify_main_theorem(&p.0, lambda, &s.0, &VerifyOptions::default())?;
        write(out, PcBoundReport::from(&report), "out")
    })
}
