//! Exercises the C surface the way a foreign caller would: raw pointers,
//! NUL-terminated strings, explicit frees, and status codes checked on every
//! call.

use bregman_lab_ffi::*;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::ptr;

fn cstring(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(bm_last_error_message()) }
        .to_str()
        .unwrap()
        .to_owned()
}

fn make_function(spec: &str) -> *mut BmFunction {
    let spec = cstring(spec);
    let mut f: *mut BmFunction = ptr::null_mut();
    let status = unsafe { bm_function_create(spec.as_ptr(), &mut f) };
    assert_eq!(status, BmStatus::Ok, "create failed: {}", last_error());
    assert!(!f.is_null());
    f
}

#[test]
fn version_matches_the_crate() {
    let version = unsafe { CStr::from_ptr(bm_version()) };
    assert_eq!(version.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn function_lifecycle_eval_grad_divergence() {
    let f = make_function(r#"{"kind":"squared_norm","dim":2}"#);
    assert_eq!(unsafe { bm_function_dim(f) }, 2);

    let x = [1.0, 2.0];
    let mut value = f64::NAN;
    assert_eq!(
        unsafe { bm_function_eval(f, x.as_ptr(), 2, &mut value) },
        BmStatus::Ok
    );
    assert_eq!(value, 5.0);

    let mut grad = [f64::NAN; 2];
    assert_eq!(
        unsafe { bm_function_grad(f, x.as_ptr(), 2, grad.as_mut_ptr()) },
        BmStatus::Ok
    );
    assert_eq!(grad, [2.0, 4.0]);

    // Divergence of the squared norm is the squared distance: 4 + 1.
    let y = [3.0, 1.0];
    let mut d = f64::NAN;
    assert_eq!(
        unsafe { bm_bregman(f, y.as_ptr(), x.as_ptr(), 2, &mut d) },
        BmStatus::Ok
    );
    assert_eq!(d, 5.0);

    unsafe { bm_function_free(f) };
}

#[test]
fn status_codes_name_the_failure() {
    // Null spec.
    let mut f: *mut BmFunction = ptr::null_mut();
    assert_eq!(
        unsafe { bm_function_create(ptr::null(), &mut f) },
        BmStatus::NullPointer
    );
    assert!(!last_error().is_empty());

    // Unparseable spec.
    let bad = cstring(r#"{"kind":"no_such_function"}"#);
    assert_eq!(
        unsafe { bm_function_create(bad.as_ptr(), &mut f) },
        BmStatus::InvalidArgument
    );
    assert!(last_error().contains("function spec"));

    // Spec that parses but fails validation (asymmetric matrix).
    let asym = cstring(r#"{"kind":"weighted_quadratic","q":[[1.0,2.0],[0.0,1.0]]}"#);
    assert_eq!(
        unsafe { bm_function_create(asym.as_ptr(), &mut f) },
        BmStatus::InvalidArgument
    );

    let f = make_function(r#"{"kind":"negative_entropy","dim":2,"lo":0.1,"hi":10.0}"#);

    // Wrong buffer length.
    let x3 = [1.0, 1.0, 1.0];
    let mut value = 0.0;
    assert_eq!(
        unsafe { bm_function_eval(f, x3.as_ptr(), 3, &mut value) },
        BmStatus::DimensionMismatch
    );

    // Point outside the entropy box.
    let outside = [0.01, 1.0];
    assert_eq!(
        unsafe { bm_function_eval(f, outside.as_ptr(), 2, &mut value) },
        BmStatus::OutsideDomain
    );

    // Non-finite coordinate.
    let non_finite = [f64::NAN, 1.0];
    assert_eq!(
        unsafe { bm_function_eval(f, non_finite.as_ptr(), 2, &mut value) },
        BmStatus::InvalidArgument
    );

    // Null output slot.
    let x = [1.0, 1.0];
    assert_eq!(
        unsafe { bm_function_eval(f, x.as_ptr(), 2, ptr::null_mut()) },
        BmStatus::NullPointer
    );

    unsafe { bm_function_free(f) };
}

#[test]
fn scenario_loads_runs_and_reports() {
    // The file loader falls back to the built-in registry by name.
    let source = cstring("contraction");
    let mut s: *mut BmScenario = ptr::null_mut();
    assert_eq!(
        unsafe { bm_scenario_load_file(source.as_ptr(), &mut s) },
        BmStatus::Ok,
        "{}",
        last_error()
    );

    let mut report: *mut c_char = ptr::null_mut();
    let mut all_passed = false;
    assert_eq!(
        unsafe { bm_scenario_run(s, ptr::null(), &mut report, &mut all_passed) },
        BmStatus::Ok,
        "{}",
        last_error()
    );
    assert!(all_passed);
    let text = unsafe { CStr::from_ptr(report) }.to_str().unwrap();
    let value: serde_json::Value = serde_json::from_str(text).unwrap();
    assert_eq!(value["scenario"], "contraction");
    assert_eq!(value["all_passed"], true);
    assert!(value["runs"].as_array().unwrap().len() >= 5);
    unsafe { bm_string_free(report) };
    unsafe { bm_scenario_free(s) };
}

#[test]
fn scenario_seed_override_lands_in_the_report() {
    let text = bregman_lab::scenario::builtin("proximity").unwrap();
    let json = cstring(text);
    let mut s: *mut BmScenario = ptr::null_mut();
    assert_eq!(
        unsafe { bm_scenario_load_json(json.as_ptr(), &mut s) },
        BmStatus::Ok,
        "{}",
        last_error()
    );

    let mut reports = Vec::new();
    for seed in [5u64, 6u64] {
        let mut report: *mut c_char = ptr::null_mut();
        assert_eq!(
            unsafe { bm_scenario_run(s, &seed, &mut report, ptr::null_mut()) },
            BmStatus::Ok
        );
        let value: serde_json::Value =
            serde_json::from_str(unsafe { CStr::from_ptr(report) }.to_str().unwrap()).unwrap();
        unsafe { bm_string_free(report) };
        assert_eq!(value["seed"], serde_json::json!(seed));
        assert_eq!(value["all_passed"], true);
        reports.push(value);
    }
    assert_ne!(reports[0], reports[1]);
    unsafe { bm_scenario_free(s) };
}

#[test]
fn scenario_rejects_bad_input() {
    let mut s: *mut BmScenario = ptr::null_mut();
    let garbage = cstring("{ not json ]");
    assert_eq!(
        unsafe { bm_scenario_load_json(garbage.as_ptr(), &mut s) },
        BmStatus::InvalidArgument
    );
    let missing = cstring("no-such-scenario-anywhere");
    assert_eq!(
        unsafe { bm_scenario_load_file(missing.as_ptr(), &mut s) },
        BmStatus::InvalidArgument
    );
    assert!(last_error().contains("no-such-scenario-anywhere"));
}

#[test]
fn frees_tolerate_null() {
    unsafe {
        bm_function_free(ptr::null_mut());
        bm_scenario_free(ptr::null_mut());
        bm_string_free(ptr::null_mut());
    }
}

#[test]
fn generated_header_covers_the_surface() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/bregman_lab.h");
    let text = std::fs::read_to_string(header).expect("build script writes the header");
    for symbol in [
        "BM_STATUS_OK",
        "typedef struct BmFunction BmFunction;",
        "typedef struct BmScenario BmScenario;",
        "bm_function_create",
        "bm_function_eval",
        "bm_function_grad",
        "bm_bregman",
        "bm_scenario_load_json",
        "bm_scenario_load_file",
        "bm_scenario_run",
        "bm_last_error_message",
        "bm_version",
        "bm_string_free",
    ] {
        assert!(text.contains(symbol), "header is missing `{symbol}`");
    }
}
