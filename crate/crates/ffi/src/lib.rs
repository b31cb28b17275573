//! C ABI over `avlip`.
//!
//! Functions are opaque `AvlipFunction` handles built from the JSON spec
//! format. Every entry point returns an `AvlipStatus`; on failure the message
//! is available from `avlip_last_error` on the same thread. Exact rationals
//! cross the boundary as `"p/q"` strings, which the caller releases with
//! `avlip_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use avlip::covering::{select_disjoint, Segment};
use avlip::extended::Extended;
use avlip::func_model::parse_spec;
use avlip::maximal::Maximal;
use avlip::rational::{format_rational, parse_rational, Rational};
use avlip::seminorms::{strong_avg_function, weak_avg_function, Estimate, StrongOptions, Verdict};
use avlip::slope::local_slope;
use avlip::variation::total_variation;
use avlip::{Error, Function};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AvlipStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Unparseable spec, rational or segment list.
    Malformed = 3,
    /// A value outside its allowed range, such as a point outside [0, 1].
    InvalidArgument = 4,
    /// The input is well formed but the operation does not apply to it.
    Precondition = 5,
    /// The output buffer is too small; the required length was written.
    BufferTooSmall = 6,
    /// A panic inside the library.
    Internal = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AvlipVerdict {
    Finite = 0,
    DivergentBeyondCap = 1,
    Unresolved = 2,
}

/// Bracket `[lower, upper]` on a seminorm; `upper` may be `INFINITY`.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct AvlipEstimate {
    pub lower: f64,
    pub upper: f64,
    pub verdict: AvlipVerdict,
    /// Refinement depth at which the cap was passed; 0 unless divergent.
    pub depth: u32,
}

/// An expanded function on [0, 1].
pub struct AvlipFunction {
    f: Function,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(AvlipStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::ParseRational(_) | Error::Malformed(_) | Error::InvalidFunction(_) | Error::Empty(_) => {
                AvlipStatus::Malformed
            }
            Error::OutOfDomain(_) | Error::InvalidArgument(_) => AvlipStatus::InvalidArgument,
            _ => AvlipStatus::Precondition,
        };
        Failure(status, e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn guard(body: impl FnOnce() -> Outcome) -> AvlipStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => AvlipStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            AvlipStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(AvlipStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(AvlipStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn read_point(p: *const c_char) -> Result<Rational, Failure> {
    Ok(parse_rational(read_str(p, "x")?)?)
}

unsafe fn handle<'a>(f: *const AvlipFunction) -> Result<&'a Function, Failure> {
    f.as_ref().map(|h| &h.f).ok_or_else(|| null("function"))
}

unsafe fn write<T>(out: *mut T, value: T) -> Outcome {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, text: String) -> Outcome {
    let c = CString::new(text).expect("formatted numbers contain no NUL");
    write(out, c.into_raw())
}

fn format_extended(value: &Extended<Rational>) -> String {
    match value {
        Extended::Finite(v) => format_rational(v),
        Extended::Infinity => "inf".into(),
    }
}

fn to_c_estimate(e: &Estimate) -> AvlipEstimate {
    let (verdict, depth) = match e.verdict {
        Verdict::Finite => (AvlipVerdict::Finite, 0),
        Verdict::DivergentBeyondCap { depth, .. } => (AvlipVerdict::DivergentBeyondCap, depth),
        Verdict::Unresolved => (AvlipVerdict::Unresolved, 0),
    };
    AvlipEstimate { lower: e.lower, upper: e.upper_f64(), verdict, depth }
}

/// Message of the last failure on this thread, or NULL. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn avlip_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a JSON function spec and expands it into a new handle.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn avlip_function_from_json(json: *const c_char, out: *mut *mut AvlipFunction) -> AvlipStatus {
    guard(|| {
        let f = parse_spec(read_str(json, "json")?)?.expand()?;
        write(out, Box::into_raw(Box::new(AvlipFunction { f })))
    })
}

/// Releases a handle; NULL is ignored.
///
/// # Safety
/// `f` must come from `avlip_function_from_json` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn avlip_function_free(f: *mut AvlipFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Releases a string returned by this library; NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn avlip_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Exact value at the rational `x`.
///
/// # Safety
/// `f` must be a live handle, `x` NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn avlip_eval(f: *const AvlipFunction, x: *const c_char, out: *mut *mut c_char) -> AvlipStatus {
    guard(|| {
        let value = handle(f)?.eval(&read_point(x)?)?;
        write_string(out, format_rational(&value))
    })
}

/// Exact total variation.
///
/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn avlip_variation(f: *const AvlipFunction, out: *mut *mut c_char) -> AvlipStatus {
    guard(|| write_string(out, format_rational(&total_variation(handle(f)?))))
}

/// Exact local slope at `x`, or `"inf"`.
///
/// # Safety
/// `f` must be a live handle, `x` NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn avlip_local_slope(
    f: *const AvlipFunction,
    x: *const c_char,
    out: *mut *mut c_char,
) -> AvlipStatus {
    guard(|| {
        let slope = local_slope(handle(f)?, &read_point(x)?)?;
        write_string(out, format_extended(&slope.value))
    })
}

/// Exact maximal function at `x`, or `"inf"`. Step functions must be
/// right-continuous.
///
/// # Safety
/// `f` must be a live handle, `x` NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn avlip_maximal(
    f: *const AvlipFunction,
    x: *const c_char,
    out: *mut *mut c_char,
) -> AvlipStatus {
    guard(|| {
        let m = Maximal::new(handle(f)?)?;
        write_string(out, format_extended(&m.at_point(&read_point(x)?)?))
    })
}

/// Strong average smoothness.
///
/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn avlip_strong_avg(
    f: *const AvlipFunction,
    tol: f64,
    cap: f64,
    out: *mut AvlipEstimate,
) -> AvlipStatus {
    guard(|| {
        let opts = StrongOptions { tol, cap, ..StrongOptions::default() };
        write(out, to_c_estimate(&strong_avg_function(handle(f)?, &opts)?))
    })
}

/// Weak average smoothness.
///
/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn avlip_weak_avg(f: *const AvlipFunction, tol: f64, out: *mut AvlipEstimate) -> AvlipStatus {
    guard(|| write(out, to_c_estimate(&weak_avg_function(handle(f)?, tol)?)))
}

/// Disjoint subfamily of `[["l","r"], ...]` covering at least half the union.
/// Writes the selected indices, ascending, into `indices[0..capacity]` and
/// their number into `count`. When `capacity` is too small, only `count` is
/// written and `BufferTooSmall` is returned.
///
/// # Safety
/// `segments_json` must be NUL-terminated, `indices` writable for `capacity`
/// entries (or NULL with zero capacity) and `count` writable.
#[no_mangle]
pub unsafe extern "C" fn avlip_select_disjoint(
    segments_json: *const c_char,
    indices: *mut usize,
    capacity: usize,
    count: *mut usize,
) -> AvlipStatus {
    guard(|| {
        let segments = Segment::parse_list(read_str(segments_json, "segments")?)?;
        let mut chosen = select_disjoint(&segments)?.indices;
        chosen.sort_unstable();
        write(count, chosen.len())?;
        if chosen.len() > capacity {
            return Err(Failure(
                AvlipStatus::BufferTooSmall,
                format!("{} indices do not fit in {capacity}", chosen.len()),
            ));
        }
        if !chosen.is_empty() {
            if indices.is_null() {
                return Err(null("indices"));
            }
            ptr::copy_nonoverlapping(chosen.as_ptr(), indices, chosen.len());
        }
        Ok(())
    })
}
