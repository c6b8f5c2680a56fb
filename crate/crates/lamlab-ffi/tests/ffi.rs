use std::ffi::{c_char, CStr, CString};
use std::ptr;

use lamlab_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    lamlab_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(lamlab_last_error()).to_str().unwrap().to_string()
}

#[test]
fn companion_and_errors() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(lamlab_companion(c("7/15").as_ptr(), &mut out), LamlabStatus::Ok);
        assert_eq!(take(out), "8/15");
        assert_eq!(last_error(), "");

        assert_eq!(lamlab_companion(c("1/6").as_ptr(), &mut out), LamlabStatus::Domain);
        assert!(!last_error().is_empty());
        assert_eq!(lamlab_companion(c("0.5").as_ptr(), &mut out), LamlabStatus::Parse);
        assert_eq!(lamlab_companion(ptr::null(), &mut out), LamlabStatus::NullPointer);
        assert_eq!(lamlab_companion(c("1/3").as_ptr(), ptr::null_mut()), LamlabStatus::NullPointer);
        let bad = [0xffu8, 0];
        assert_eq!(lamlab_companion(bad.as_ptr().cast(), &mut out), LamlabStatus::InvalidUtf8);
        lamlab_string_free(ptr::null_mut());
    }
}

#[test]
fn mateability_and_counts() {
    unsafe {
        let mut ok = false;
        assert_eq!(lamlab_is_mateable(c("3/7").as_ptr(), c("3/31").as_ptr(), &mut ok), LamlabStatus::Ok);
        assert!(ok);
        assert_eq!(lamlab_is_mateable(c("3/7").as_ptr(), c("3/7").as_ptr(), &mut ok), LamlabStatus::Ok);
        assert!(!ok);
        let mut out = ptr::null_mut();
        assert_eq!(lamlab_mandelbrot_count(5, &mut out), LamlabStatus::Ok);
        assert_eq!(take(out), "16");
        assert_eq!(lamlab_mandelbrot_count(0, &mut out), LamlabStatus::Domain);
    }
}

#[test]
fn lamination_handle() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(lamlab_lamination_new(c("3/31").as_ptr(), &mut h), LamlabStatus::Ok);
        let mut period = 0;
        assert_eq!(lamlab_lamination_period(h, &mut period), LamlabStatus::Ok);
        assert_eq!(period, 5);
        let mut yes = false;
        assert_eq!(lamlab_lamination_leaf_in(h, c("1/15").as_ptr(), c("2/15").as_ptr(), &mut yes), LamlabStatus::Ok);
        assert!(yes);
        assert_eq!(lamlab_lamination_leaf_in(h, c("1/3").as_ptr(), c("1/3").as_ptr(), &mut yes), LamlabStatus::Domain);
        let mut out = ptr::null_mut();
        assert_eq!(lamlab_lamination_build_json(h, 4, &mut out), LamlabStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(report["minor"], serde_json::json!(["3/31", "4/31"]));
        assert_eq!(lamlab_lamination_build_json(h, 99, &mut out), LamlabStatus::ResourceCap);
        lamlab_lamination_free(h);
        lamlab_lamination_free(ptr::null_mut());

        assert_eq!(lamlab_lamination_period(ptr::null(), &mut period), LamlabStatus::NullPointer);
        assert_eq!(lamlab_lamination_new(c("1/6").as_ptr(), &mut h), LamlabStatus::Domain);
    }
}

#[test]
fn mating_handle() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(lamlab_mating_new(c("7/15").as_ptr(), c("5/31").as_ptr(), &mut h), LamlabStatus::Ok);
        let mut ok = true;
        assert_eq!(lamlab_mating_ok(h, 10, &mut ok), LamlabStatus::Ok);
        assert!(!ok);
        let mut out = ptr::null_mut();
        assert_eq!(lamlab_mating_report_json(h, 10, &mut out), LamlabStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(report["findings"][0]["code"], "OVERSIZED_CLASS");
        lamlab_mating_free(h);

        assert_eq!(lamlab_mating_new(c("3/7").as_ptr(), c("3/31").as_ptr(), &mut h), LamlabStatus::Ok);
        assert_eq!(lamlab_mating_ok(h, 10, &mut ok), LamlabStatus::Ok);
        assert!(ok);
        lamlab_mating_free(h);
    }
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/lamlab.h")).unwrap();
    for name in [
        "typedef struct LamlabLamination LamlabLamination;",
        "typedef struct LamlabMating LamlabMating;",
        "LAMLAB_STATUS_OK = 0",
        "lamlab_last_error(void)",
        "lamlab_string_free(char *s)",
        "lamlab_companion(",
        "lamlab_lamination_new(",
        "lamlab_mating_report_json(",
    ] {
        assert!(header.contains(name), "{name}");
    }
}
