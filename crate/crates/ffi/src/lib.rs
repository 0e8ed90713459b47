//! C ABI over `toric-kahler`.
//!
//! Conventions:
//! - every function returns a [`TkStatus`]; results go through out-pointers;
//! - t-potentials are opaque [`TkTPotential`] handles, released with
//!   [`tk_potential_free`];
//! - matrices are row-major `n × n` buffers supplied by the caller;
//! - the detail of the most recent failure on the calling thread is available
//!   from [`tk_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use toric_kahler::asymptotics::decay_scan;
use toric_kahler::curvature::{hessian_t_family, scalar_curvature_reduced};
use toric_kahler::scalarflat::{burns_simanca_potential, scalar_flat_family, solve_boundary_coefficients};
use toric_kahler::{Error, TPotential};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    NonAdmissible = 4,
    Singular = 5,
    Accuracy = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Opaque t-potential.
pub struct TkTPotential {
    inner: TPotential,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TkStatus {
    match e {
        Error::InvalidDimension(_) | Error::DimensionMismatch { .. } | Error::InsufficientOrder { .. } | Error::JetMismatch(_) => {
            TkStatus::InvalidArgument
        }
        Error::Domain(_) | Error::NearBoundary { .. } | Error::OriginExcluded | Error::Range(_) => TkStatus::Domain,
        Error::NonAdmissible(_) => TkStatus::NonAdmissible,
        Error::SingularPoint(_) | Error::SingularMetric(_) | Error::DegeneratePotential(_) => TkStatus::Singular,
        Error::Accuracy(_) | Error::IllConditionedFit(_) => TkStatus::Accuracy,
    }
}

/// Runs `f`, translating library errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (TkStatus, String)>) -> TkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TkStatus::Ok,
        Ok(Err((status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("panic inside toric-kahler".into());
            TkStatus::Panic
        }
    }
}

fn lib<T>(r: toric_kahler::Result<T>) -> Result<T, (TkStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (TkStatus, String) {
    (TkStatus::NullPointer, format!("{what} is null"))
}

fn dimension(n: usize) -> Result<(), (TkStatus, String)> {
    // Only the catalog dimensions are meaningful; this guards buffer sizes.
    if n == 0 || n > 64 {
        return Err((TkStatus::InvalidArgument, format!("dimension {n} outside 1..=64")));
    }
    Ok(())
}

fn export(pot: TPotential, out: *mut *mut TkTPotential) -> Result<(), (TkStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    let handle = Box::into_raw(Box::new(TkTPotential { inner: pot }));
    // SAFETY: `out` is non-null and the caller promises it is writable.
    unsafe { *out = handle };
    Ok(())
}

/// # Safety
/// `p` must be null or a handle from this library that has not been freed.
unsafe fn handle<'a>(p: *const TkTPotential) -> Result<&'a TPotential, (TkStatus, String)> {
    unsafe { p.as_ref() }.map(|h| &h.inner).ok_or_else(|| null("potential"))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn tk_status_message(status: TkStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        TkStatus::Ok => b"ok\0",
        TkStatus::NullPointer => b"null pointer argument\0",
        TkStatus::InvalidArgument => b"invalid argument\0",
        TkStatus::Domain => b"argument outside the domain\0",
        TkStatus::NonAdmissible => b"potential is not admissible\0",
        TkStatus::Singular => b"singular point or metric\0",
        TkStatus::Accuracy => b"requested accuracy not reached\0",
        TkStatus::BufferTooSmall => b"output buffer too small\0",
        TkStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Copies the last error message of this thread, NUL-terminated and truncated
/// to `len` bytes. Returns the full message length excluding the NUL, or 0
/// when there is no error recorded.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn tk_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            // SAFETY: the caller guarantees `len` writable bytes at `buf`.
            unsafe {
                ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// `F'' ≡ 0` on `(0, ∞)`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn tk_potential_flat(out: *mut *mut TkTPotential) -> TkStatus {
    guard(|| export(TPotential::flat(), out))
}

/// `F'' = 1/(1 - t)` on `(0, 1)`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn tk_potential_fubini_study(out: *mut *mut TkTPotential) -> TkStatus {
    guard(|| export(TPotential::fubini_study(), out))
}

/// `F'' = 1/(t(t - 1))` on `(1, ∞)`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn tk_potential_generalized_burns(out: *mut *mut TkTPotential) -> TkStatus {
    guard(|| export(TPotential::generalized_burns(), out))
}

/// The scalar-flat blow-up potential in dimension `n ≥ 2`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn tk_potential_burns_simanca(n: usize, out: *mut *mut TkTPotential) -> TkStatus {
    guard(|| {
        dimension(n)?;
        export(lib(burns_simanca_potential(n))?, out)
    })
}

/// `F'' = (At + B)/(t(tⁿ - At - B))` on `(0, ∞)`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn tk_potential_scalar_flat_family(
    n: usize,
    a: f64,
    b: f64,
    out: *mut *mut TkTPotential,
) -> TkStatus {
    guard(|| {
        dimension(n)?;
        if !a.is_finite() || !b.is_finite() {
            return Err((TkStatus::InvalidArgument, "A and B must be finite".into()));
        }
        export(lib(scalar_flat_family(n, a, b))?, out)
    })
}

/// # Safety
/// `p` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn tk_potential_free(p: *mut TkTPotential) {
    if !p.is_null() {
        // SAFETY: handles are created by `Box::into_raw` in `export`.
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Writes the Taylor coefficients `c_0..c_order` of `F''` at `t`.
///
/// # Safety
/// `p` must be a live handle and `coeffs` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn tk_potential_f2_jet(
    p: *const TkTPotential,
    t: f64,
    order: usize,
    coeffs: *mut f64,
    len: usize,
) -> TkStatus {
    guard(|| {
        let pot = unsafe { handle(p) }?;
        if coeffs.is_null() {
            return Err(null("coeffs"));
        }
        if len < order + 1 {
            return Err((TkStatus::BufferTooSmall, format!("need {} doubles, got {len}", order + 1)));
        }
        let jet = lib(pot.f2_jet(t, order))?;
        // SAFETY: `coeffs` holds at least `order + 1` doubles.
        unsafe { ptr::copy_nonoverlapping(jet.coeffs().as_ptr(), coeffs, order + 1) };
        Ok(())
    })
}

/// `S = t^{1-n}(t^{n+1}F''/(1 + tF''))''` in dimension `n`.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tk_scalar_curvature_reduced(
    p: *const TkTPotential,
    n: usize,
    t: f64,
    out: *mut f64,
) -> TkStatus {
    guard(|| {
        let pot = unsafe { handle(p) }?;
        dimension(n)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = lib(scalar_curvature_reduced(pot, n, t))?;
        unsafe { *out = s };
        Ok(())
    })
}

/// Hessian `G`, its inverse and `det G⁻¹` of `g = ½(Σ xᵢ ln xᵢ + F(t))` at `x`.
/// `g` and `g_inv` are row-major `n × n`; any of the three outputs may be null.
///
/// # Safety
/// `p` must be a live handle, `x` must hold `n` doubles and non-null outputs
/// must hold `n * n` (or one) doubles.
#[no_mangle]
pub unsafe extern "C" fn tk_hessian_t_family(
    p: *const TkTPotential,
    x: *const f64,
    n: usize,
    g: *mut f64,
    g_inv: *mut f64,
    det_g_inv: *mut f64,
) -> TkStatus {
    guard(|| {
        let pot = unsafe { handle(p) }?;
        dimension(n)?;
        if x.is_null() {
            return Err(null("x"));
        }
        // SAFETY: the caller guarantees `n` readable doubles.
        let point = unsafe { std::slice::from_raw_parts(x, n) };
        let h = lib(hessian_t_family(pot, point))?;
        for (dst, m) in [(g, &h.g), (g_inv, &h.g_inv)] {
            if !dst.is_null() {
                for i in 0..n {
                    for j in 0..n {
                        unsafe { *dst.add(i * n + j) = m[(i, j)] };
                    }
                }
            }
        }
        if !det_g_inv.is_null() {
            unsafe { *det_g_inv = h.det_g_inv };
        }
        Ok(())
    })
}

/// Boundary matching on the blow-up polytope: `A`, `B` and the coefficients of
/// `Q(t) = (tⁿ - At - B)/(t - 1)` in ascending degree. `q_written` receives the
/// number of coefficients, also when `q_len` is too small.
///
/// # Safety
/// Non-null pointers must be writable; `q` must hold `q_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn tk_boundary_match(
    n: usize,
    a: *mut f64,
    b: *mut f64,
    q: *mut f64,
    q_len: usize,
    q_written: *mut usize,
) -> TkStatus {
    guard(|| {
        dimension(n)?;
        let m = lib(solve_boundary_coefficients(n))?;
        let coeffs = m.quotient_f64();
        if !q_written.is_null() {
            unsafe { *q_written = coeffs.len() };
        }
        if !a.is_null() {
            unsafe { *a = m.a_f64() };
        }
        if !b.is_null() {
            unsafe { *b = m.b_f64() };
        }
        if !q.is_null() {
            if q_len < coeffs.len() {
                return Err((
                    TkStatus::BufferTooSmall,
                    format!("need {} doubles, got {q_len}", coeffs.len()),
                ));
            }
            unsafe { ptr::copy_nonoverlapping(coeffs.as_ptr(), q, coeffs.len()) };
        }
        Ok(())
    })
}

/// `δ(t) = 2ⁿ t⁻ⁿ Q(t)` for the matched coefficients.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tk_boundary_delta(n: usize, t: f64, out: *mut f64) -> TkStatus {
    guard(|| {
        dimension(n)?;
        if out.is_null() {
            return Err(null("out"));
        }
        if t.is_nan() || t < 1.0 {
            return Err((TkStatus::Domain, format!("δ is defined on t ≥ 1, got {t}")));
        }
        let m = lib(solve_boundary_coefficients(n))?;
        unsafe { *out = m.delta(t) };
        Ok(())
    })
}

/// Fitted log-log slope of the Burns–Simanca deviation from the flat metric.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tk_decay_slope(n: usize, u_min: f64, u_max: f64, samples: usize, out: *mut f64) -> TkStatus {
    guard(|| {
        dimension(n)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = lib(decay_scan(n, u_min, u_max, samples))?;
        unsafe { *out = r.fitted_slope };
        Ok(())
    })
}
