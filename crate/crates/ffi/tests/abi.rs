use std::ffi::{c_char, CStr};
use std::ptr;

use verlinde_ffi::*;

fn take(s: *mut c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_string_lossy().into_owned();
    unsafe { verlinde_string_free(s) };
    out
}

fn handle(g: u32, k: u64, lam: &[i64]) -> *mut VerlindeHandle {
    let mut h = ptr::null_mut();
    let st = unsafe { verlinde_input_new(g, k, lam.as_ptr(), lam.len(), &mut h) };
    assert_eq!(st, VerlindeStatus::Ok, "{}", last_error_string());
    h
}

#[test]
fn residue_and_sum_agree() {
    let h = handle(2, 3, &[1, 0, -1]);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { verlinde_ver_residue(h, &mut s) }, VerlindeStatus::Ok);
    assert_eq!(take(s), "320/1");
    let mut err = f64::NAN;
    assert_eq!(unsafe { verlinde_ver_sum(h, 256, &mut s, &mut err) }, VerlindeStatus::Ok);
    assert_eq!(take(s), "320");
    assert!(err < 1e-10);
    unsafe { verlinde_input_free(h) };
}

#[test]
fn chamber_value_off_the_simplex() {
    let h = handle(1, 2, &[0, 0, 0]);
    let mut s = ptr::null_mut();
    let inside = [4i64, 1, -5];
    assert_eq!(unsafe { verlinde_chamber_value(h, inside.as_ptr(), 10, 1, &mut s) }, VerlindeStatus::Ok);
    let a = take(s);
    assert_eq!(unsafe { verlinde_chamber_value(h, inside.as_ptr(), 10, 3, &mut s) }, VerlindeStatus::Ok);
    assert_eq!(take(s), a);
    let singular = [1i64, 0, -1];
    assert_eq!(unsafe { verlinde_chamber_value(h, singular.as_ptr(), 2, 1, &mut s) }, VerlindeStatus::InvalidInput);
    assert!(!last_error_string().is_empty());
    unsafe { verlinde_input_free(h) };
}

#[test]
fn errors_are_reported() {
    let mut h = ptr::null_mut();
    let bad = [1i64, 0];
    assert_eq!(unsafe { verlinde_input_new(1, 1, bad.as_ptr(), 2, &mut h) }, VerlindeStatus::InvalidInput);
    assert!(h.is_null());
    assert!(!last_error_string().is_empty());
    assert_eq!(unsafe { verlinde_input_new(1, 1, ptr::null(), 2, &mut h) }, VerlindeStatus::NullPointer);

    let h = handle(1, 1, &[3, -3]);
    let mut s = ptr::null_mut();
    let mut err = 0.0;
    assert_eq!(unsafe { verlinde_ver_sum(h, 256, &mut s, &mut err) }, VerlindeStatus::InvalidInput);
    assert_eq!(unsafe { verlinde_ver_sum(h, 16, &mut s, &mut err) }, VerlindeStatus::Precision);
    let ok = handle(1, 1, &[0, 0]);
    assert_eq!(unsafe { verlinde_ver_sum(ok, 16, &mut s, &mut err) }, VerlindeStatus::Precision);
    assert_eq!(unsafe { verlinde_ver_residue(ptr::null(), &mut s) }, VerlindeStatus::NullPointer);
    unsafe {
        verlinde_input_free(h);
        verlinde_input_free(ok);
        verlinde_input_free(ptr::null_mut());
        verlinde_string_free(ptr::null_mut());
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(verlinde_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/verlinde.h")).unwrap();
    for name in [
        "verlinde_last_error",
        "verlinde_version",
        "verlinde_input_new",
        "verlinde_input_free",
        "verlinde_ver_residue",
        "verlinde_ver_sum",
        "verlinde_chamber_value",
        "verlinde_string_free",
        "typedef struct VerlindeHandle VerlindeHandle",
        "VERLINDE_STATUS_PANIC = 5",
    ] {
        assert!(header.contains(name), "{name}");
    }
}
