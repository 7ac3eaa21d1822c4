//! C ABI over the laboratory core: opaque handles, integer status codes, and
//! a thread-local error message. Every entry point catches panics at the
//! boundary, reports failure through [`BmStatus`], and writes its outputs
//! only on success. Strings handed out by this library must be released with
//! [`bm_string_free`]; handles with their matching `*_free` function.

use bregman_lab::convex::{bregman, ConvexFunctionHandle};
use bregman_lab::functions::{build, FunctionSpec};
use bregman_lab::scenario::{self, run::run_scenario, PreparedScenario};
use bregman_lab::{Error, Point};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Result code of every fallible entry point. `BM_STATUS_OK` is zero;
/// anything else leaves a description in [`bm_last_error_message`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BmStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The input parsed but described something the library rejects.
    InvalidArgument = 3,
    /// A coordinate buffer length disagrees with the handle's dimension.
    DimensionMismatch = 4,
    /// A point fell outside the function's effective domain.
    OutsideDomain = 5,
    /// The filesystem said no.
    Io = 6,
    /// A check or iteration failed at runtime (budget, escape, panic, ...).
    RuntimeError = 7,
}

/// Opaque convex-function handle; create with [`bm_function_create`],
/// release with [`bm_function_free`].
pub struct BmFunction {
    handle: ConvexFunctionHandle,
}

/// Opaque prepared scenario; create with [`bm_scenario_load_json`] or
/// [`bm_scenario_load_file`], release with [`bm_scenario_free`].
pub struct BmScenario {
    prepared: PreparedScenario,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: BmStatus, message: impl std::fmt::Display) -> BmStatus {
    let text = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(text).unwrap_or_default());
    status
}

fn fail_error(error: Error) -> BmStatus {
    let status = match &error {
        Error::DimensionMismatch { .. } => BmStatus::DimensionMismatch,
        Error::OutsideDomain { .. } => BmStatus::OutsideDomain,
        Error::NonFinitePoint { .. }
        | Error::InvalidFunction(_)
        | Error::InvalidSet(_)
        | Error::InvalidInput(_)
        | Error::DegeneratePair { .. }
        | Error::ConfigParse { .. }
        | Error::ConfigSemantic { .. } => BmStatus::InvalidArgument,
        Error::Io(_) => BmStatus::Io,
        _ => BmStatus::RuntimeError,
    };
    fail(status, error)
}

/// Catches panics so they never unwind across the C boundary.
fn guarded(body: impl FnOnce() -> BmStatus) -> BmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(
            BmStatus::RuntimeError,
            "internal panic caught at the ABI boundary",
        ),
    }
}

/// # Safety
/// `ptr` must be null or a valid NUL-terminated string.
unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, BmStatus> {
    if ptr.is_null() {
        return Err(fail(BmStatus::NullPointer, format!("{what} is null")));
    }
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|e| fail(BmStatus::InvalidUtf8, format!("{what}: {e}")))
}

/// # Safety
/// `ptr` must be null or point at `dim` readable doubles.
unsafe fn read_point(ptr: *const f64, dim: usize, what: &str) -> Result<Point, BmStatus> {
    if ptr.is_null() {
        return Err(fail(BmStatus::NullPointer, format!("{what} is null")));
    }
    if dim == 0 {
        return Err(fail(
            BmStatus::InvalidArgument,
            format!("{what} has zero length"),
        ));
    }
    Point::new(unsafe { std::slice::from_raw_parts(ptr, dim) }.to_vec()).map_err(fail_error)
}

fn require_dim(function: &BmFunction, dim: usize) -> Result<(), BmStatus> {
    if function.handle.dim() != dim {
        return Err(fail_error(Error::DimensionMismatch {
            expected: function.handle.dim(),
            got: dim,
        }));
    }
    Ok(())
}

/// Library version as a static NUL-terminated string; never freed.
#[no_mangle]
pub extern "C" fn bm_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Message describing the most recent failure on the calling thread (empty
/// string if none). The pointer stays valid until the next failing call on
/// the same thread; copy it if you need to keep it.
#[no_mangle]
pub extern "C" fn bm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Builds a convex-function handle from a JSON spec, e.g.
/// `{"kind":"squared_norm","dim":2}` or
/// `{"kind":"negative_entropy","dim":2,"lo":0.1,"hi":10.0}`.
/// On success writes a new handle to `out`.
///
/// # Safety
/// `spec_json` must be a valid NUL-terminated string and `out` a valid
/// pointer to pointer storage.
#[no_mangle]
pub unsafe extern "C" fn bm_function_create(
    spec_json: *const c_char,
    out: *mut *mut BmFunction,
) -> BmStatus {
    guarded(|| {
        if out.is_null() {
            return fail(BmStatus::NullPointer, "output pointer is null");
        }
        let text = match unsafe { read_str(spec_json, "function spec") } {
            Ok(t) => t,
            Err(status) => return status,
        };
        let spec: FunctionSpec = match serde_json::from_str(text) {
            Ok(s) => s,
            Err(e) => return fail(BmStatus::InvalidArgument, format!("function spec: {e}")),
        };
        match build(&spec) {
            Ok(handle) => {
                unsafe { *out = Box::into_raw(Box::new(BmFunction { handle })) };
                BmStatus::Ok
            }
            Err(e) => fail_error(e),
        }
    })
}

/// Dimension of the function's argument space; 0 for a null handle.
///
/// # Safety
/// `function` must be null or a live handle from [`bm_function_create`].
#[no_mangle]
pub unsafe extern "C" fn bm_function_dim(function: *const BmFunction) -> usize {
    match unsafe { function.as_ref() } {
        Some(f) => f.handle.dim(),
        None => 0,
    }
}

/// Evaluates the function at `x` (a buffer of `dim` doubles), writing the
/// finite value to `value_out`. Points outside the effective domain yield
/// `BM_STATUS_OUTSIDE_DOMAIN`.
///
/// # Safety
/// `function` must be a live handle, `x` must point at `dim` readable
/// doubles, and `value_out` at writable storage for one double.
#[no_mangle]
pub unsafe extern "C" fn bm_function_eval(
    function: *const BmFunction,
    x: *const f64,
    dim: usize,
    value_out: *mut f64,
) -> BmStatus {
    guarded(|| {
        let Some(function) = (unsafe { function.as_ref() }) else {
            return fail(BmStatus::NullPointer, "function handle is null");
        };
        if value_out.is_null() {
            return fail(BmStatus::NullPointer, "value output pointer is null");
        }
        if let Err(status) = require_dim(function, dim) {
            return status;
        }
        let point = match unsafe { read_point(x, dim, "evaluation point") } {
            Ok(p) => p,
            Err(status) => return status,
        };
        match function.handle.finite_value(&point) {
            Ok(value) => {
                unsafe { *value_out = value };
                BmStatus::Ok
            }
            Err(e) => fail_error(e),
        }
    })
}

/// Writes the gradient at `x` into `grad_out` (a buffer of `dim` doubles).
/// Points outside the domain interior yield `BM_STATUS_OUTSIDE_DOMAIN`.
///
/// # Safety
/// `function` must be a live handle, `x` must point at `dim` readable
/// doubles, and `grad_out` at `dim` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bm_function_grad(
    function: *const BmFunction,
    x: *const f64,
    dim: usize,
    grad_out: *mut f64,
) -> BmStatus {
    guarded(|| {
        let Some(function) = (unsafe { function.as_ref() }) else {
            return fail(BmStatus::NullPointer, "function handle is null");
        };
        if grad_out.is_null() {
            return fail(BmStatus::NullPointer, "gradient output pointer is null");
        }
        if let Err(status) = require_dim(function, dim) {
            return status;
        }
        let point = match unsafe { read_point(x, dim, "gradient point") } {
            Ok(p) => p,
            Err(status) => return status,
        };
        match function.handle.gradient(&point) {
            Ok(grad) => {
                unsafe {
                    std::ptr::copy_nonoverlapping(grad.coords().as_ptr(), grad_out, dim);
                }
                BmStatus::Ok
            }
            Err(e) => fail_error(e),
        }
    })
}

/// Divergence of the function between `y` and `x` (the gap at `y` of the
/// linearization taken at `x`), written to `value_out`.
///
/// # Safety
/// `function` must be a live handle; `y` and `x` must each point at `dim`
/// readable doubles, and `value_out` at writable storage for one double.
#[no_mangle]
pub unsafe extern "C" fn bm_bregman(
    function: *const BmFunction,
    y: *const f64,
    x: *const f64,
    dim: usize,
    value_out: *mut f64,
) -> BmStatus {
    guarded(|| {
        let Some(function) = (unsafe { function.as_ref() }) else {
            return fail(BmStatus::NullPointer, "function handle is null");
        };
        if value_out.is_null() {
            return fail(BmStatus::NullPointer, "value output pointer is null");
        }
        if let Err(status) = require_dim(function, dim) {
            return status;
        }
        let y = match unsafe { read_point(y, dim, "outer point") } {
            Ok(p) => p,
            Err(status) => return status,
        };
        let x = match unsafe { read_point(x, dim, "base point") } {
            Ok(p) => p,
            Err(status) => return status,
        };
        match bregman(&function.handle, &y, &x) {
            Ok(value) => {
                unsafe { *value_out = value };
                BmStatus::Ok
            }
            Err(e) => fail_error(e),
        }
    })
}

/// Releases a function handle. Null is a no-op.
///
/// # Safety
/// `function` must be null or a handle from [`bm_function_create`] that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn bm_function_free(function: *mut BmFunction) {
    if !function.is_null() {
        drop(unsafe { Box::from_raw(function) });
    }
}

/// # Safety
/// `out` must be a valid, non-null pointer to pointer storage (callers check).
unsafe fn load_scenario(
    config: bregman_lab::scenario::ScenarioConfig,
    out: *mut *mut BmScenario,
) -> BmStatus {
    match scenario::prepare(config) {
        Ok(prepared) => {
            unsafe { *out = Box::into_raw(Box::new(BmScenario { prepared })) };
            BmStatus::Ok
        }
        Err(e) => fail_error(e),
    }
}

/// Parses and prepares a scenario from JSON text. On success writes a new
/// handle to `out`.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer
/// to pointer storage.
#[no_mangle]
pub unsafe extern "C" fn bm_scenario_load_json(
    text: *const c_char,
    out: *mut *mut BmScenario,
) -> BmStatus {
    guarded(|| {
        if out.is_null() {
            return fail(BmStatus::NullPointer, "output pointer is null");
        }
        let text = match unsafe { read_str(text, "scenario JSON") } {
            Ok(t) => t,
            Err(status) => return status,
        };
        match scenario::parse_config(text) {
            Ok(config) => unsafe { load_scenario(config, out) },
            Err(e) => fail_error(e),
        }
    })
}

/// Loads a scenario from a file path, falling back to the built-in registry
/// when no such file exists (so `"contraction"` works without a file).
///
/// # Safety
/// `source` must be a valid NUL-terminated string and `out` a valid pointer
/// to pointer storage.
#[no_mangle]
pub unsafe extern "C" fn bm_scenario_load_file(
    source: *const c_char,
    out: *mut *mut BmScenario,
) -> BmStatus {
    guarded(|| {
        if out.is_null() {
            return fail(BmStatus::NullPointer, "output pointer is null");
        }
        let source = match unsafe { read_str(source, "scenario source") } {
            Ok(t) => t,
            Err(status) => return status,
        };
        match scenario::load_config(source) {
            Ok(config) => unsafe { load_scenario(config, out) },
            Err(e) => fail_error(e),
        }
    })
}

/// Runs every check in the scenario. `seed` may be null (use the scenario's
/// own seed) or point at a replacement. On success writes the full JSON
/// report to `report_json_out` (release with [`bm_string_free`]) and, when
/// `all_passed_out` is non-null, whether every run met its expectation.
///
/// # Safety
/// `scenario` must be a live handle; `seed` must be null or point at a
/// readable u64; `report_json_out` must be a valid pointer to pointer
/// storage; `all_passed_out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn bm_scenario_run(
    scenario: *const BmScenario,
    seed: *const u64,
    report_json_out: *mut *mut c_char,
    all_passed_out: *mut bool,
) -> BmStatus {
    guarded(|| {
        let Some(scenario) = (unsafe { scenario.as_ref() }) else {
            return fail(BmStatus::NullPointer, "scenario handle is null");
        };
        if report_json_out.is_null() {
            return fail(BmStatus::NullPointer, "report output pointer is null");
        }
        let seed_override = unsafe { seed.as_ref() }.copied();
        let artifacts = match run_scenario(&scenario.prepared, seed_override) {
            Ok(a) => a,
            Err(e) => return fail_error(e),
        };
        let json = match serde_json::to_string_pretty(&artifacts.report) {
            Ok(j) => j,
            Err(e) => return fail(BmStatus::RuntimeError, format!("report serialization: {e}")),
        };
        let c = match CString::new(json) {
            Ok(c) => c,
            Err(e) => return fail(BmStatus::RuntimeError, format!("report contains NUL: {e}")),
        };
        unsafe {
            *report_json_out = c.into_raw();
            if !all_passed_out.is_null() {
                *all_passed_out = artifacts.report.all_passed;
            }
        }
        BmStatus::Ok
    })
}

/// Releases a scenario handle. Null is a no-op.
///
/// # Safety
/// `scenario` must be null or a handle from one of the loaders that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn bm_scenario_free(scenario: *mut BmScenario) {
    if !scenario.is_null() {
        drop(unsafe { Box::from_raw(scenario) });
    }
}

/// Releases a string returned by this library. Null is a no-op.
///
/// # Safety
/// `text` must be null or a string handed out by this library that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn bm_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(unsafe { CString::from_raw(text) });
    }
}
