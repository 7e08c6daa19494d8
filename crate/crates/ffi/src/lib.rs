//! C ABI over the synthesis engine.
//!
//! Problems and results are opaque heap handles released with their `_free`
//! function. Fallible calls return a [`GsStatus`]; on failure the message is
//! available from [`gs_last_error_message`] on the same thread. Strings
//! returned as `char *` are owned by the caller and released with
//! [`gs_string_free`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use golog_synth::controller::Controller;
use golog_synth::game::{self, LabelRule, Solution, SolveOptions, Verdict};
use golog_synth::quotient::SetOrder;
use golog_synth::{Error, Problem};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidInput = 2,
    ResourceLimit = 3,
    Internal = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsVerdict {
    Controllable = 0,
    Uncontrollable = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsOrder {
    Smyth = 0,
    Hoare = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsLabelRule {
    Existential = 0,
    Universal = 1,
}

/// Search options; pass `NULL` to [`gs_synthesize`] for the defaults.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GsOptions {
    pub order: GsOrder,
    pub label_rule: GsLabelRule,
    pub max_nodes: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GsStats {
    pub nodes_created: u64,
    pub nodes_expanded: u64,
    pub nodes_pruned: u64,
    pub max_depth: u64,
    pub wall_time_us: u64,
}

/// Opaque grounded problem.
pub struct GsProblem {
    inner: Problem,
}

/// Opaque synthesis result.
pub struct GsResult {
    verdict: Verdict,
    stats: GsStats,
    controller_json: Option<String>,
    witness: String,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn status_of(e: &Error) -> GsStatus {
    match e {
        Error::Parse(_) | Error::Invalid(_) | Error::Io(_) | Error::Json(_) => GsStatus::InvalidInput,
        Error::Resource(_) => GsStatus::ResourceLimit,
        Error::Internal(_) => GsStatus::Internal,
    }
}

/// Runs `f`, recording errors and panics.
fn guard(f: impl FnOnce() -> Result<(), (GsStatus, String)>) -> GsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside golog-synth");
            GsStatus::Panic
        }
    }
}

fn engine(e: Error) -> (GsStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (GsStatus, String) {
    (GsStatus::NullArgument, format!("`{name}` is null"))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, (GsStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (GsStatus::InvalidInput, format!("`{name}` is not UTF-8")))
}

fn owned(s: &str) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or `NULL`. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses, validates and grounds a problem.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_problem_from_source(source: *const c_char, out: *mut *mut GsProblem) -> GsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let src = text(source, "source")?;
        let inner = Problem::from_source(src).map_err(engine)?;
        *out = Box::into_raw(Box::new(GsProblem { inner }));
        Ok(())
    })
}

/// # Safety
/// `problem` must come from [`gs_problem_from_source`] and not be used
/// afterwards. `NULL` is ignored.
#[no_mangle]
pub unsafe extern "C" fn gs_problem_free(problem: *mut GsProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

fn to_result(p: &Problem, sol: &Solution) -> Result<GsResult, Error> {
    let s = &sol.stats;
    let stats = GsStats {
        nodes_created: s.nodes_created as u64,
        nodes_expanded: s.nodes_expanded as u64,
        nodes_pruned: s.nodes_pruned as u64,
        max_depth: s.max_depth as u64,
        wall_time_us: s.wall_time.as_micros() as u64,
    };
    let controller_json = match Controller::from_solution(sol) {
        Some(c) => Some(serde_json::to_string_pretty(&c.to_file(p, sol.verdict)?)?),
        None => None,
    };
    let mut witness = String::new();
    if let Some(w) = &sol.witness {
        for st in &w.steps {
            witness.push_str(p.theory.action_name(st.action));
            witness.push('\n');
        }
        witness.push_str(if w.violation { "violation\n" } else { "deadlock\n" });
    }
    Ok(GsResult { verdict: sol.verdict, stats, controller_json, witness })
}

/// Decides controllability.
///
/// # Safety
/// `problem` must be a live handle, `options` `NULL` or a valid pointer
/// whose enum fields hold declared enumerators, and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_synthesize(
    problem: *const GsProblem,
    options: *const GsOptions,
    out: *mut *mut GsResult,
) -> GsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let p = &problem.as_ref().ok_or_else(|| null("problem"))?.inner;
        let mut opts = SolveOptions::default();
        if let Some(o) = options.as_ref() {
            opts.order = match o.order {
                GsOrder::Smyth => SetOrder::Smyth,
                GsOrder::Hoare => SetOrder::Hoare,
            };
            opts.rule = match o.label_rule {
                GsLabelRule::Existential => LabelRule::Existential,
                GsLabelRule::Universal => LabelRule::Universal,
            };
            opts.max_nodes = usize::try_from(o.max_nodes).unwrap_or(usize::MAX);
        }
        let sol = game::solve(p, opts).map_err(engine)?;
        *out = Box::into_raw(Box::new(to_result(p, &sol).map_err(engine)?));
        Ok(())
    })
}

/// Default options.
#[no_mangle]
pub extern "C" fn gs_options_default() -> GsOptions {
    GsOptions { order: GsOrder::Smyth, label_rule: GsLabelRule::Existential, max_nodes: 200_000 }
}

/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gs_result_verdict(result: *const GsResult) -> GsVerdict {
    match (*result).verdict {
        Verdict::Controllable => GsVerdict::Controllable,
        Verdict::Uncontrollable => GsVerdict::Uncontrollable,
    }
}

/// Controller as JSON, or `NULL` if the problem is uncontrollable. Release
/// with [`gs_string_free`].
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gs_result_controller_json(result: *const GsResult) -> *mut c_char {
    match result.as_ref().and_then(|r| r.controller_json.as_deref()) {
        Some(s) => owned(s),
        None => ptr::null_mut(),
    }
}

/// Witness path, one action per line followed by `violation` or
/// `deadlock`; empty if controllable. Release with [`gs_string_free`].
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gs_result_witness(result: *const GsResult) -> *mut c_char {
    match result.as_ref() {
        Some(r) => owned(&r.witness),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `result` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_result_stats(result: *const GsResult, out: *mut GsStats) -> GsStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null("result"))?;
        let o = out.as_mut().ok_or_else(|| null("out"))?;
        *o = r.stats;
        Ok(())
    })
}

/// # Safety
/// `result` must come from [`gs_synthesize`] and not be used afterwards.
/// `NULL` is ignored.
#[no_mangle]
pub unsafe extern "C" fn gs_result_free(result: *mut GsResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Evaluates the bad formula on the fluent trace induced by `trace`
/// (`t: action(args)` per line). Sets `*bad` to 1 if it holds. Fails with
/// [`GsStatus::Internal`] if the formula checker and automaton disagree.
///
/// # Safety
/// `problem` must be a live handle, `trace` a NUL-terminated string and
/// `bad` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_check_trace(problem: *const GsProblem, trace: *const c_char, bad: *mut i32) -> GsStatus {
    guard(|| {
        let p = &problem.as_ref().ok_or_else(|| null("problem"))?.inner;
        let out = bad.as_mut().ok_or_else(|| null("bad"))?;
        let t = text(trace, "trace")?;
        let timed = p.parse_trace(t).map_err(engine)?;
        let (by_check, by_ata) = p.check_trace(&timed).map_err(engine)?;
        if by_check != by_ata {
            return Err((GsStatus::Internal, "formula checker and automaton disagree".into()));
        }
        *out = i32::from(by_check);
        Ok(())
    })
}

/// # Safety
/// `s` must be a string returned by this library, or `NULL`.
#[no_mangle]
pub unsafe extern "C" fn gs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
