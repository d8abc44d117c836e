//! C interface to `tmotive`.
//!
//! Objects are opaque handles released with the matching `*_free`. Every
//! fallible call returns a [`TmStatus`]; on failure [`tm_last_error`] gives a
//! message for the calling thread. Strings returned by the library are
//! released with [`tm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use tmotive::analytic::Analytic;
use tmotive::lattice::{dual_exists, SiegelMatrix};
use tmotive::ore::{ma_matrix, solve_semilinear_bounded};
use tmotive::{Ctx, Error, PuiseuxNumber};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Parse = 3,
    InsufficientPrecision = 4,
    DivisionByZero = 5,
    OutsideDomain = 6,
    Shape = 7,
    NotConvergent = 8,
    ZeroAtPrecision = 9,
    Unsupported = 10,
    Internal = 11,
}

/// Arithmetic context for one `q`, with cached Carlitz data.
pub struct TmContext {
    an: Analytic,
}

/// A truncated Puiseux number bound to the context it was created in.
pub struct TmNumber {
    x: PuiseuxNumber,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

fn status_of(e: &Error) -> TmStatus {
    match e {
        Error::InvalidParameter(_) | Error::Incompatible(_) | Error::ZeroParameter(_) => TmStatus::InvalidParameter,
        Error::Parse(_) => TmStatus::Parse,
        Error::InsufficientPrecision(_) | Error::NotAPower(_) => TmStatus::InsufficientPrecision,
        Error::DivisionByZeroAtPrecision(_) => TmStatus::DivisionByZero,
        Error::OutsideLogDomain { .. } | Error::OutsideNeighborhood { .. } => TmStatus::OutsideDomain,
        Error::Shape(_) | Error::SingularHead => TmStatus::Shape,
        Error::TailNotConvergent { .. } | Error::NoSuchSlope(_) | Error::ContractionFailure(_) => {
            TmStatus::NotConvergent
        }
        Error::Unsupported(_) => TmStatus::Unsupported,
    }
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), TmStatus>) -> TmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TmStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal error");
            TmStatus::Internal
        }
    }
}

fn lift<T>(r: tmotive::Result<T>) -> Result<T, TmStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, TmStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null pointer");
        TmStatus::NullPointer
    })
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), TmStatus> {
    if out.is_null() {
        set_error("null output pointer");
        return Err(TmStatus::NullPointer);
    }
    out.write(v);
    Ok(())
}

fn boxed(x: PuiseuxNumber) -> *mut TmNumber {
    Box::into_raw(Box::new(TmNumber { x }))
}

fn same_ctx(ctx: &Ctx, x: &PuiseuxNumber) -> Result<(), TmStatus> {
    if ctx.same(x.ctx()) {
        Ok(())
    } else {
        set_error("number belongs to another context");
        Err(TmStatus::InvalidParameter)
    }
}

/// Message for the last failed call on this thread. Valid until the next call.
#[no_mangle]
pub extern "C" fn tm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_context_new(q: u64, out: *mut *mut TmContext) -> TmStatus {
    guard(|| {
        let ctx = lift(Ctx::new(q))?;
        write(out, Box::into_raw(Box::new(TmContext { an: Analytic::new(&ctx) })))
    })
}

/// # Safety
/// `ctx` must come from [`tm_context_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tm_context_free(ctx: *mut TmContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Parses a series literal such as `t + w*t^(2/3) + O(t^(10))`.
///
/// # Safety
/// `s` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_number_parse(
    ctx: *const TmContext,
    s: *const c_char,
    out: *mut *mut TmNumber,
) -> TmStatus {
    guard(|| {
        let ctx = deref(ctx)?;
        if s.is_null() {
            set_error("null string");
            return Err(TmStatus::NullPointer);
        }
        let text = CStr::from_ptr(s).to_str().map_err(|_| {
            set_error("literal is not UTF-8");
            TmStatus::Parse
        })?;
        let x = lift(ctx.an.ctx().parse(text))?;
        write(out, boxed(x))
    })
}

/// # Safety
/// `x` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tm_number_free(x: *mut TmNumber) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

/// # Safety
/// `x` must be a valid number; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_number_to_string(x: *const TmNumber, out: *mut *mut c_char) -> TmStatus {
    guard(|| {
        let x = deref(x)?;
        let s = CString::new(x.x.to_string()).map_err(|_| TmStatus::Internal)?;
        write(out, s.into_raw())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Valuation `num/den` in lowest terms; `ZeroAtPrecision` when the number
/// has no known nonzero term.
///
/// # Safety
/// `x` must be a valid number; `num`, `den` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_number_valuation(x: *const TmNumber, num: *mut i64, den: *mut i64) -> TmStatus {
    guard(|| {
        let x = deref(x)?;
        match x.x.valuation() {
            Some(v) => {
                write(num, *v.numer())?;
                write(den, *v.denom())
            }
            None => {
                set_error("zero at precision");
                Err(TmStatus::ZeroAtPrecision)
            }
        }
    })
}

/// The periods `π_1` of the Carlitz module and `π_2` of its rank-2 analogue.
///
/// # Safety
/// `ctx` must be valid; `pi1`, `pi2` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_periods(
    ctx: *const TmContext,
    pi1: *mut *mut TmNumber,
    pi2: *mut *mut TmNumber,
) -> TmStatus {
    guard(|| {
        let ctx = deref(ctx)?;
        let (p1, p2) = (lift(ctx.an.pi1())?, lift(ctx.an.pi2())?);
        if pi1.is_null() || pi2.is_null() {
            set_error("null output pointer");
            return Err(TmStatus::NullPointer);
        }
        write(pi1, boxed(p1))?;
        write(pi2, boxed(p2))
    })
}

/// First Siegel entry `s(a)` of the lattice of `M_t(a)`.
///
/// # Safety
/// `ctx`, `a` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_siegel_s(ctx: *const TmContext, a: *const TmNumber, out: *mut *mut TmNumber) -> TmStatus {
    guard(|| {
        let (ctx, a) = (deref(ctx)?, deref(a)?);
        same_ctx(ctx.an.ctx(), &a.x)?;
        let s = lift(ctx.an.siegel_s(&a.x))?;
        write(out, boxed(s.s))
    })
}

/// Whether `(s11, ω)` has a dual lattice.
///
/// # Safety
/// `ctx`, `s11` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_dual_exists(ctx: *const TmContext, s11: *const TmNumber, out: *mut bool) -> TmStatus {
    guard(|| {
        let (ctx, s11) = (deref(ctx)?, deref(s11)?);
        same_ctx(ctx.an.ctx(), &s11.x)?;
        let s = SiegelMatrix::row_1x2(s11.x.clone(), ctx.an.ctx().omega());
        let v = lift(dual_exists(&s))?;
        write(out, v.is_lattice)
    })
}

/// Whether the bounded search finds an isomorphism `M(a) → M(a2)` of
/// `τ`-degree at most `kmax`.
///
/// # Safety
/// `ctx`, `a`, `a2` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_iso_check(
    ctx: *const TmContext,
    a: *const TmNumber,
    a2: *const TmNumber,
    kmax: usize,
    out: *mut bool,
) -> TmStatus {
    guard(|| {
        let (ctx, a, a2) = (deref(ctx)?, deref(a)?, deref(a2)?);
        same_ctx(ctx.an.ctx(), &a.x)?;
        same_ctx(ctx.an.ctx(), &a2.x)?;
        let sol = lift(solve_semilinear_bounded(&ma_matrix(&a.x), &ma_matrix(&a2.x), kmax))?;
        write(out, sol.has_unit())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    unsafe fn parse(ctx: *const TmContext, s: &str) -> *mut TmNumber {
        let c = CString::new(s).unwrap();
        let mut x = ptr::null_mut();
        assert_eq!(tm_number_parse(ctx, c.as_ptr(), &mut x), TmStatus::Ok);
        x
    }

    fn last_error() -> String {
        unsafe { CStr::from_ptr(tm_last_error()).to_string_lossy().into_owned() }
    }

    #[test]
    fn round_trip_and_valuation() {
        unsafe {
            let mut ctx = ptr::null_mut();
            assert_eq!(tm_context_new(2, &mut ctx), TmStatus::Ok);
            let x = parse(ctx, "t^(1/3) + w*t^(1)");
            let mut s = ptr::null_mut();
            assert_eq!(tm_number_to_string(x, &mut s), TmStatus::Ok);
            let text = CStr::from_ptr(s).to_str().unwrap().to_owned();
            tm_string_free(s);
            let y = parse(ctx, &text);
            let (mut n, mut d) = (0, 0);
            assert_eq!(tm_number_valuation(y, &mut n, &mut d), TmStatus::Ok);
            assert_eq!((n, d), (1, 3));
            let z = parse(ctx, "0");
            assert_eq!(tm_number_valuation(z, &mut n, &mut d), TmStatus::ZeroAtPrecision);
            for p in [x, y, z] {
                tm_number_free(p);
            }
            tm_context_free(ctx);
        }
    }

    #[test]
    fn periods_and_siegel() {
        unsafe {
            let mut ctx = ptr::null_mut();
            assert_eq!(tm_context_new(3, &mut ctx), TmStatus::Ok);
            let (mut p1, mut p2) = (ptr::null_mut(), ptr::null_mut());
            assert_eq!(tm_periods(ctx, &mut p1, &mut p2), TmStatus::Ok);
            let (mut n, mut d) = (0, 0);
            tm_number_valuation(p2, &mut n, &mut d);
            assert_eq!((n, d), (-9, 8));
            let mut dual = false;
            assert_eq!(tm_dual_exists(ctx, p1, &mut dual), TmStatus::Ok);
            assert!(dual);
            let zero = parse(ctx, "0");
            assert_eq!(tm_dual_exists(ctx, zero, &mut dual), TmStatus::Ok);
            assert!(!dual);
            let a = parse(ctx, "t");
            let mut s = ptr::null_mut();
            assert_eq!(tm_siegel_s(ctx, a, &mut s), TmStatus::Ok);
            assert_eq!(tm_number_valuation(s, &mut n, &mut d), TmStatus::Ok);
            for p in [p1, p2, zero, a, s] {
                tm_number_free(p);
            }
            tm_context_free(ctx);
        }
    }

    #[test]
    fn iso_check_matches_criterion() {
        unsafe {
            let mut ctx = ptr::null_mut();
            tm_context_new(2, &mut ctx);
            let one = parse(ctx, "1");
            let w = parse(ctx, "w");
            let th = parse(ctx, "t^(-1)");
            let mut iso = false;
            assert_eq!(tm_iso_check(ctx, one, w, 4, &mut iso), TmStatus::Ok);
            assert!(iso);
            assert_eq!(tm_iso_check(ctx, one, th, 4, &mut iso), TmStatus::Ok);
            assert!(!iso);
            for p in [one, w, th] {
                tm_number_free(p);
            }
            tm_context_free(ctx);
        }
    }

    #[test]
    fn errors_are_reported() {
        unsafe {
            let mut ctx = ptr::null_mut();
            assert_eq!(tm_context_new(6, &mut ctx), TmStatus::InvalidParameter);
            assert!(!last_error().is_empty());
            assert_eq!(tm_context_new(2, &mut ctx), TmStatus::Ok);
            let bad = CString::new("t^(").unwrap();
            let mut x = ptr::null_mut();
            assert_eq!(tm_number_parse(ctx, bad.as_ptr(), &mut x), TmStatus::Parse);
            assert!(last_error().contains("parse"));
            assert_eq!(tm_number_parse(ctx, ptr::null(), &mut x), TmStatus::NullPointer);
            let mut other = ptr::null_mut();
            tm_context_new(3, &mut other);
            let y = parse(other, "t");
            let mut b = false;
            assert_eq!(tm_dual_exists(ctx, y, &mut b), TmStatus::InvalidParameter);
            tm_number_free(y);
            tm_context_free(other);
            tm_context_free(ctx);
            tm_context_free(ptr::null_mut());
        }
    }
}
