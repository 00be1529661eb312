//! C interface to the `plse` solver.
//!
//! Instances and solutions are opaque handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call returns
//! a [`PlseStatus`]; on failure, [`plse_last_error_message`] describes the
//! problem for the calling thread. Strings returned through out-parameters
//! must be released with [`plse_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use plse::cli::check_solution;
use plse::generate::{GenScheme, Scheme};
use plse::pls::{parse_grid, parse_instance, serialize_instance, PlsInstance};
use plse::runner::{solve, Algorithm, SolveOutcome};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlseStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    GenerationFailed = 4,
    SolveFailed = 5,
    InvalidSolution = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// A validated partial Latin square.
pub struct PlseInstance {
    inner: PlsInstance,
}

/// The result of a solver run.
pub struct PlseSolution {
    outcome: SolveOutcome,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn fail(status: PlseStatus, msg: impl Into<String>) -> PlseStatus {
    set_error(msg);
    status
}

// Runs `f`, turning panics into `Panic` and clearing the error on success.
fn guard(f: impl FnOnce() -> PlseStatus) -> PlseStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(PlseStatus::Ok) => {
            set_error("");
            PlseStatus::Ok
        }
        Ok(status) => status,
        Err(_) => fail(PlseStatus::Panic, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, PlseStatus> {
    if p.is_null() {
        return Err(fail(PlseStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(PlseStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn into_c_string(s: String, out: *mut *mut c_char) -> PlseStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            PlseStatus::Ok
        }
        Err(_) => fail(PlseStatus::Panic, "string contains a NUL byte"),
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn plse_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn plse_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn plse_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an instance in `.pls` text form.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn plse_instance_parse(text: *const c_char, out: *mut *mut PlseInstance) -> PlseStatus {
    guard(|| {
        if out.is_null() {
            return fail(PlseStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let text = match str_arg(text, "text") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_instance(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(PlseInstance { inner }));
                PlseStatus::Ok
            }
            Err(e) => fail(PlseStatus::ParseError, e.to_string()),
        }
    })
}

/// Generates a random instance. `scheme` is `"qc"` or `"qwh"`; `ratio` is
/// the fraction of filled cells.
///
/// # Safety
/// `scheme` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn plse_instance_generate(
    scheme: *const c_char,
    n: u32,
    ratio: f64,
    seed: u64,
    out: *mut *mut PlseInstance,
) -> PlseStatus {
    guard(|| {
        if out.is_null() {
            return fail(PlseStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let scheme: Scheme = match str_arg(scheme, "scheme").map(str::parse) {
            Ok(Ok(s)) => s,
            Ok(Err(e)) => return fail(PlseStatus::InvalidArgument, format!("{e}")),
            Err(s) => return s,
        };
        let g = GenScheme { scheme, ratio, seed };
        match g.generate(n as usize) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(PlseInstance { inner }));
                PlseStatus::Ok
            }
            Err(e) => fail(PlseStatus::GenerationFailed, e.to_string()),
        }
    })
}

/// # Safety
/// `inst` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn plse_instance_free(inst: *mut PlseInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Grid order, or 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn plse_instance_order(inst: *const PlseInstance) -> u32 {
    inst.as_ref().map_or(0, |i| i.inner.n() as u32)
}

/// Number of given cells, or 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn plse_instance_given(inst: *const PlseInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.inner.len())
}

/// Writes the instance in `.pls` text form to `*out`.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn plse_instance_to_text(inst: *const PlseInstance, out: *mut *mut c_char) -> PlseStatus {
    guard(|| {
        let Some(inst) = inst.as_ref() else {
            return fail(PlseStatus::NullPointer, "instance is null");
        };
        if out.is_null() {
            return fail(PlseStatus::NullPointer, "out is null");
        }
        into_c_string(serialize_instance(&inst.inner), out)
    })
}

/// Runs an algorithm (`"ls1"`, `"ls2"`, `"ls3"`, `"tr-ls"`, `"ils1"`,
/// `"ils2"`, `"ils3"` or `"tr-ils"`) for at most `time_limit_s` seconds.
///
/// # Safety
/// `inst` must be a live handle, `alg` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn plse_solve(
    inst: *const PlseInstance,
    alg: *const c_char,
    time_limit_s: f64,
    seed: u64,
    out: *mut *mut PlseSolution,
) -> PlseStatus {
    guard(|| {
        if out.is_null() {
            return fail(PlseStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let Some(inst) = inst.as_ref() else {
            return fail(PlseStatus::NullPointer, "instance is null");
        };
        let alg: Algorithm = match str_arg(alg, "alg").map(str::parse) {
            Ok(Ok(a)) => a,
            Ok(Err(e)) => return fail(PlseStatus::InvalidArgument, e),
            Err(s) => return s,
        };
        if !(time_limit_s.is_finite() && time_limit_s > 0.0) {
            return fail(PlseStatus::InvalidArgument, "time limit must be positive");
        }
        match solve(&inst.inner, alg, Duration::from_secs_f64(time_limit_s), seed) {
            Ok(outcome) => {
                *out = Box::into_raw(Box::new(PlseSolution { outcome }));
                PlseStatus::Ok
            }
            Err(e) => fail(PlseStatus::SolveFailed, e.to_string()),
        }
    })
}

/// # Safety
/// `sol` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn plse_solution_free(sol: *mut PlseSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Number of cells the solver filled, or 0 for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn plse_solution_size(sol: *const PlseSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.outcome.solution.len())
}

/// Size of the greedy starting solution, or 0 for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn plse_solution_initial_size(sol: *const PlseSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.outcome.stats.initial_size)
}

/// Whether every cell is filled, which proves optimality.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn plse_solution_is_optimal(sol: *const PlseSolution) -> bool {
    sol.as_ref().is_some_and(|s| s.outcome.optimal)
}

/// Copies the filled grid, row-major with 0 for empty cells, into `buf`,
/// which must hold at least n*n entries.
///
/// # Safety
/// `sol` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn plse_solution_grid(sol: *const PlseSolution, buf: *mut u16, len: usize) -> PlseStatus {
    guard(|| {
        let Some(sol) = sol.as_ref() else {
            return fail(PlseStatus::NullPointer, "solution is null");
        };
        if buf.is_null() {
            return fail(PlseStatus::NullPointer, "buffer is null");
        }
        let grid = sol.outcome.merged.to_grid();
        if len < grid.len() {
            return fail(PlseStatus::BufferTooSmall, format!("need {} entries, got {len}", grid.len()));
        }
        ptr::copy_nonoverlapping(grid.as_ptr(), buf, grid.len());
        PlseStatus::Ok
    })
}

/// Writes the filled grid in `.pls` text form to `*out`.
///
/// # Safety
/// `sol` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn plse_solution_to_text(sol: *const PlseSolution, out: *mut *mut c_char) -> PlseStatus {
    guard(|| {
        let Some(sol) = sol.as_ref() else {
            return fail(PlseStatus::NullPointer, "solution is null");
        };
        if out.is_null() {
            return fail(PlseStatus::NullPointer, "out is null");
        }
        into_c_string(serialize_instance(&sol.outcome.merged), out)
    })
}

/// Checks that `solution_text` contains the instance and breaks no Latin
/// square rule. Returns `InvalidSolution` with the first violation as the
/// error message otherwise.
///
/// # Safety
/// Both arguments must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn plse_verify(instance_text: *const c_char, solution_text: *const c_char) -> PlseStatus {
    guard(|| {
        let (inst, sol) = match (str_arg(instance_text, "instance"), str_arg(solution_text, "solution")) {
            (Ok(i), Ok(s)) => (i, s),
            (Err(e), _) | (_, Err(e)) => return e,
        };
        let inst = match parse_instance(inst) {
            Ok(i) => i,
            Err(e) => return fail(PlseStatus::ParseError, format!("instance: {e}")),
        };
        let (n, grid) = match parse_grid(sol) {
            Ok(g) => g,
            Err(e) => return fail(PlseStatus::ParseError, format!("solution: {e}")),
        };
        match check_solution(&inst, n, &grid) {
            Ok(_) => PlseStatus::Ok,
            Err(e) => fail(PlseStatus::InvalidSolution, e),
        }
    })
}
