//! C interface to `lamlab`.
//!
//! Angles cross the boundary as NUL-terminated `"num/den"` strings. Every
//! fallible call returns a [`LamlabStatus`] and writes its result through an
//! out pointer; on failure [`lamlab_last_error`] describes what went wrong.
//! Strings returned by the library are released with [`lamlab_string_free`],
//! handles with their own `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{self, AssertUnwindSafe};

use lamlab::mating::{self, MatingSpec};
use lamlab::{limits, qml, symdyn, Angle, Error, LaminationApprox, LaminationSpec, Leaf};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LamlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Domain = 4,
    ResourceCap = 5,
    Consistency = 6,
    Panic = 7,
}

impl From<&Error> for LamlabStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parse(_) => LamlabStatus::Parse,
            Error::Domain(_) | Error::DegenerateMinor => LamlabStatus::Domain,
            Error::ResourceCap { .. } | Error::ClassOverflow { .. } => LamlabStatus::ResourceCap,
            Error::Consistency(_) => LamlabStatus::Consistency,
        }
    }
}

/// A lamination `L_p`.
pub struct LamlabLamination {
    spec: LaminationSpec,
}

/// A pair of laminations to be mated.
pub struct LamlabMating {
    spec: MatingSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

struct Failure(LamlabStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure((&e).into(), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(LamlabStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LamlabStatus {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            LamlabStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside lamlab");
            LamlabStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(LamlabStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn angle(s: *const c_char, what: &str) -> Result<Angle, Failure> {
    Ok(text(s, what)?.parse::<Angle>()?)
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(value);
    Ok(())
}

fn owned(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure(LamlabStatus::Consistency, "output contains NUL".into()))
}

fn json(s: serde_json::Result<String>) -> Result<*mut c_char, Failure> {
    owned(s.map_err(|e| Failure(LamlabStatus::Consistency, e.to_string()))?)
}

unsafe fn handle<'a, T>(h: *const T) -> Result<&'a T, Failure> {
    h.as_ref().ok_or_else(|| null("handle"))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn lamlab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn lamlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Sets the largest period any enumeration may reach; returns the value in
/// effect after clamping.
#[no_mangle]
pub extern "C" fn lamlab_set_max_period(n: u32) -> u32 {
    limits::set_max_period(n)
}

/// Sets the largest pullback depth; returns the value in effect.
#[no_mangle]
pub extern "C" fn lamlab_set_max_depth(n: u32) -> u32 {
    limits::set_max_depth(n)
}

/// Other endpoint of the minor leaf through a periodic angle.
///
/// # Safety
/// `x` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lamlab_companion(x: *const c_char, out: *mut *mut c_char) -> LamlabStatus {
    guard(|| {
        let c = qml::companion(&angle(x, "x")?)?;
        put(out, owned(c.to_string())?)
    })
}

/// Whether `L_p` and the conjugate of `L_q` can be mated.
///
/// # Safety
/// `p` and `q` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lamlab_is_mateable(p: *const c_char, q: *const c_char, out: *mut bool) -> LamlabStatus {
    guard(|| {
        let ok = qml::is_mateable(&angle(p, "p")?, &angle(q, "q")?)?;
        put(out, ok)
    })
}

/// Number of hyperbolic components of period dividing `m`, as a decimal string.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lamlab_mandelbrot_count(m: u32, out: *mut *mut c_char) -> LamlabStatus {
    guard(|| {
        let n = symdyn::mandelbrot_component_count(m)?;
        put(out, owned(n.to_string())?)
    })
}

/// Creates the lamination of a periodic angle.
///
/// # Safety
/// `p` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lamlab_lamination_new(p: *const c_char, out: *mut *mut LamlabLamination) -> LamlabStatus {
    guard(|| {
        let spec = LaminationSpec::new(&angle(p, "p")?)?;
        put(out, Box::into_raw(Box::new(LamlabLamination { spec })))
    })
}

/// Releases a lamination. Null is ignored.
///
/// # Safety
/// `h` must come from [`lamlab_lamination_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn lamlab_lamination_free(h: *mut LamlabLamination) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Period of the minor leaf.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lamlab_lamination_period(h: *const LamlabLamination, out: *mut u32) -> LamlabStatus {
    guard(|| put(out, handle(h)?.spec.period()))
}

/// Whether the chord `{a, b}` is a leaf.
///
/// # Safety
/// `h` must be a live handle; `a` and `b` NUL-terminated strings; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lamlab_lamination_leaf_in(
    h: *const LamlabLamination,
    a: *const c_char,
    b: *const c_char,
    out: *mut bool,
) -> LamlabStatus {
    guard(|| {
        let l = Leaf::new(angle(a, "a")?, angle(b, "b")?)?;
        put(out, handle(h)?.spec.leaf_in(&l)?)
    })
}

/// Finite approximation to `depth` pullbacks, as a JSON report.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lamlab_lamination_build_json(
    h: *const LamlabLamination,
    depth: u32,
    out: *mut *mut c_char,
) -> LamlabStatus {
    guard(|| {
        let approx = LaminationApprox::build(&handle(h)?.spec, depth)?;
        put(out, json(serde_json::to_string(&approx.report()))?)
    })
}

/// Creates a mating of `L_p` with the conjugate of `L_q`.
///
/// # Safety
/// `p` and `q` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lamlab_mating_new(
    p: *const c_char,
    q: *const c_char,
    out: *mut *mut LamlabMating,
) -> LamlabStatus {
    guard(|| {
        let spec = MatingSpec::new(&angle(p, "p")?, &angle(q, "q")?)?;
        put(out, Box::into_raw(Box::new(LamlabMating { spec })))
    })
}

/// Releases a mating. Null is ignored.
///
/// # Safety
/// `h` must come from [`lamlab_mating_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn lamlab_mating_free(h: *mut LamlabMating) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Full mating report for classes up to `period_bound`, as JSON.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lamlab_mating_report_json(
    h: *const LamlabMating,
    period_bound: u32,
    out: *mut *mut c_char,
) -> LamlabStatus {
    guard(|| {
        let r = mating::check_theorem_3_5(&handle(h)?.spec, period_bound)?;
        put(out, json(serde_json::to_string(&r))?)
    })
}

/// Whether every class up to `period_bound` passes the disjoint-closure checks.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lamlab_mating_ok(h: *const LamlabMating, period_bound: u32, out: *mut bool) -> LamlabStatus {
    guard(|| {
        let r = mating::check_theorem_3_5(&handle(h)?.spec, period_bound)?;
        put(out, r.thm35_ok)
    })
}
