//! C ABI over the `verlinde` crate.
//!
//! Inputs live behind an opaque [`VerlindeHandle`]. Every call returns a
//! [`VerlindeStatus`]; on failure [`verlinde_last_error`] describes it.
//! Strings handed out by the library are freed with [`verlinde_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use verlinde::diagonal_bases::hamiltonian_basis;
use verlinde::exact_series::Rational;
use verlinde::residue_engine::{p_c, ver_residue, ChamberSpec, EngineError, VerlindeInput};
use verlinde::verlinde_sum::{ver_sum, SumError};
use verlinde::weight_space::{IntegralWeight, WeightVector};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerlindeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Computation = 3,
    Precision = 4,
    Panic = 5,
}

/// A validated `(r, g, k, λ)`.
pub struct VerlindeHandle {
    input: VerlindeInput,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

fn fail(status: VerlindeStatus, msg: impl std::fmt::Display) -> VerlindeStatus {
    set_error(msg.to_string());
    status
}

fn guard(f: impl FnOnce() -> VerlindeStatus) -> VerlindeStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(VerlindeStatus::Panic, "internal panic"),
    }
}

fn engine_status(e: &EngineError) -> VerlindeStatus {
    match e {
        EngineError::Input(_) | EngineError::Weight(_) => VerlindeStatus::InvalidInput,
        _ => VerlindeStatus::Computation,
    }
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> VerlindeStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            VerlindeStatus::Ok
        }
        Err(e) => fail(VerlindeStatus::Computation, e),
    }
}

fn rational_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Message for the last failed call on this thread; empty after success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn verlinde_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn verlinde_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds an input from `r` weight entries summing to zero.
///
/// # Safety
/// `lambda` points to `r` readable `int64_t`; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn verlinde_input_new(
    g: u32,
    k: u64,
    lambda: *const i64,
    r: usize,
    out: *mut *mut VerlindeHandle,
) -> VerlindeStatus {
    guard(|| {
        if lambda.is_null() || out.is_null() {
            return fail(VerlindeStatus::NullPointer, "null argument");
        }
        let lam = std::slice::from_raw_parts(lambda, r).to_vec();
        let input = match IntegralWeight::new(lam).map_err(EngineError::from).and_then(|l| VerlindeInput::new(g, k, l)) {
            Ok(i) => i,
            Err(e) => return fail(VerlindeStatus::InvalidInput, e),
        };
        *out = Box::into_raw(Box::new(VerlindeHandle { input }));
        VerlindeStatus::Ok
    })
}

/// # Safety
/// `h` is null or came from [`verlinde_input_new`] and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn verlinde_input_free(h: *mut VerlindeHandle) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Residue route at the chamber of `λ̂/k̂`, as `"p/q"`.
///
/// # Safety
/// `h` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn verlinde_ver_residue(h: *const VerlindeHandle, out: *mut *mut c_char) -> VerlindeStatus {
    guard(|| {
        if h.is_null() || out.is_null() {
            return fail(VerlindeStatus::NullPointer, "null argument");
        }
        match ver_residue(&(*h).input) {
            Ok(q) => write_string(out, rational_string(&q)),
            Err(e) => fail(engine_status(&e), e),
        }
    })
}

/// Trigonometric sum at `bits` of precision: the nearest integer as a decimal
/// string and the certified error bound.
///
/// # Safety
/// `h` is a live handle; `out` and `err_bound` are writable.
#[no_mangle]
pub unsafe extern "C" fn verlinde_ver_sum(
    h: *const VerlindeHandle,
    bits: usize,
    out: *mut *mut c_char,
    err_bound: *mut f64,
) -> VerlindeStatus {
    guard(|| {
        if h.is_null() || out.is_null() || err_bound.is_null() {
            return fail(VerlindeStatus::NullPointer, "null argument");
        }
        match ver_sum(&(*h).input, bits) {
            Ok(s) => {
                *err_bound = s.err_bound;
                write_string(out, s.nearest_int.to_string())
            }
            Err(e @ (SumError::InsufficientPrecision { .. } | SumError::Precision(_))) => fail(VerlindeStatus::Precision, e),
            Err(e @ SumError::OutsideSimplex(_)) => fail(VerlindeStatus::InvalidInput, e),
            Err(e) => fail(VerlindeStatus::Computation, e),
        }
    })
}

/// Chamber polynomial at the regular point `c_i = num_i / den` of `V*`,
/// summed over the Hamiltonian basis `H_m`.
///
/// # Safety
/// `h` is a live handle; `num` points to `r` readable `int64_t`; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn verlinde_chamber_value(
    h: *const VerlindeHandle,
    num: *const i64,
    den: i64,
    m: usize,
    out: *mut *mut c_char,
) -> VerlindeStatus {
    guard(|| {
        if h.is_null() || num.is_null() || out.is_null() {
            return fail(VerlindeStatus::NullPointer, "null argument");
        }
        if den == 0 {
            return fail(VerlindeStatus::InvalidInput, "zero denominator");
        }
        let input = &(*h).input;
        let c: Vec<Rational> = std::slice::from_raw_parts(num, input.r)
            .iter()
            .map(|&n| Rational::new(n.into(), den.into()))
            .collect();
        let spec = match WeightVector::new(c).map_err(EngineError::from).and_then(ChamberSpec::anywhere) {
            Ok(s) => s,
            Err(e) => return fail(VerlindeStatus::InvalidInput, e),
        };
        let d = match hamiltonian_basis(m, input.r) {
            Ok(d) => d,
            Err(e) => return fail(VerlindeStatus::InvalidInput, e),
        };
        match p_c(input, &spec, &d) {
            Ok(q) => write_string(out, rational_string(&q)),
            Err(e) => fail(engine_status(&e), e),
        }
    })
}

/// # Safety
/// `s` is null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn verlinde_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Copies the last error into an owned Rust string; for tests and wrappers.
pub fn last_error_string() -> String {
    unsafe { CStr::from_ptr(verlinde_last_error()) }.to_string_lossy().into_owned()
}

