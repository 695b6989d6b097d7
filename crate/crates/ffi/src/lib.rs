//! C interface to `ia-core`.
//!
//! Automata are opaque `IaAutomaton` handles released with
//! [`ia_automaton_free`]. Strings returned through `char **` out-parameters
//! are owned by the caller and released with [`ia_string_free`]. Every
//! function returns an [`IaStatus`]; on failure [`ia_last_error`] describes
//! the most recent error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ia_core::format::{export_dot_with, parse, serialize};
use ia_core::game::DEFAULT_BUDGET;
use ia_core::lattice::{check_all, check_relation, AllOptions};
use ia_core::transform::{delta_closure, determinize, determinize_iu, QuiescenceConfig};
use ia_core::{Error, InterfaceAutomaton, Relation, Status};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IaStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    AlphabetMismatch = 4,
    DeltaNameClash = 5,
    NotInputEnabled = 6,
    UnknownRelation = 7,
    Internal = 8,
}

/// Verdict of a check, numbered like the `ia` exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IaVerdict {
    Holds = 0,
    Fails = 1,
    Inconclusive = 3,
}

/// A parsed interface automaton.
pub struct IaAutomaton(InterfaceAutomaton);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(code: IaStatus, msg: &str) -> IaStatus {
    set_error(msg);
    code
}

fn from_core(e: &Error) -> IaStatus {
    let code = match e {
        Error::AlphabetMismatch(_) | Error::ForeignLabel(_) => IaStatus::AlphabetMismatch,
        Error::DeltaNameClash(_) => IaStatus::DeltaNameClash,
        Error::NotInputEnabled { .. } => IaStatus::NotInputEnabled,
        Error::Internal(_) => IaStatus::Internal,
        _ => IaStatus::Parse,
    };
    fail(code, &e.to_string())
}

/// Runs `f`, turning panics into `IaStatus::Internal`.
fn guard(f: impl FnOnce() -> IaStatus) -> IaStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(IaStatus::Internal, "panic inside ia-core"))
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, IaStatus> {
    if p.is_null() {
        return Err(fail(IaStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(IaStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn handle<'a>(p: *const IaAutomaton) -> Result<&'a InterfaceAutomaton, IaStatus> {
    p.as_ref()
        .map(|a| &a.0)
        .ok_or_else(|| fail(IaStatus::NullArgument, "null automaton handle"))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> IaStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            IaStatus::Ok
        }
        Err(_) => fail(IaStatus::Internal, "output contains a NUL byte"),
    }
}

unsafe fn put_handle(out: *mut *mut IaAutomaton, s: InterfaceAutomaton) -> IaStatus {
    *out = Box::into_raw(Box::new(IaAutomaton(s)));
    IaStatus::Ok
}

macro_rules! attempt {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(code) => return code,
        }
    };
}

/// Parses the text format into a new handle stored in `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ia_automaton_parse(text: *const c_char, out: *mut *mut IaAutomaton) -> IaStatus {
    guard(|| {
        if out.is_null() {
            return fail(IaStatus::NullArgument, "null out pointer");
        }
        *out = ptr::null_mut();
        let src = attempt!(str_arg(text));
        match parse(src) {
            Ok(s) => put_handle(out, s),
            Err(e) => from_core(&e),
        }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `a` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ia_automaton_free(a: *mut IaAutomaton) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Number of states, or 0 for a null handle.
///
/// # Safety
/// `a` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ia_automaton_num_states(a: *const IaAutomaton) -> usize {
    a.as_ref().map_or(0, |a| a.0.num_states())
}

/// Canonical text form.
///
/// # Safety
/// `a` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ia_automaton_serialize(a: *const IaAutomaton, out: *mut *mut c_char) -> IaStatus {
    guard(|| {
        if out.is_null() {
            return fail(IaStatus::NullArgument, "null out pointer");
        }
        let s = attempt!(handle(a));
        put_string(out, serialize(s))
    })
}

/// Graphviz rendering. `delta_name` may be null for the default `delta`.
///
/// # Safety
/// `a` must be a live handle, `delta_name` null or NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ia_automaton_to_dot(
    a: *const IaAutomaton,
    delta_name: *const c_char,
    out: *mut *mut c_char,
) -> IaStatus {
    guard(|| {
        if out.is_null() {
            return fail(IaStatus::NullArgument, "null out pointer");
        }
        let s = attempt!(handle(a));
        let delta = if delta_name.is_null() { "delta" } else { attempt!(str_arg(delta_name)) };
        put_string(out, export_dot_with(s, delta))
    })
}

/// Quiescence closure. `delta_name` may be null for the default `delta`.
///
/// # Safety
/// `a` must be a live handle, `delta_name` null or NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ia_delta_closure(
    a: *const IaAutomaton,
    delta_name: *const c_char,
    out: *mut *mut IaAutomaton,
) -> IaStatus {
    guard(|| {
        if out.is_null() {
            return fail(IaStatus::NullArgument, "null out pointer");
        }
        *out = ptr::null_mut();
        let s = attempt!(handle(a));
        let cfg = if delta_name.is_null() {
            QuiescenceConfig::default()
        } else {
            QuiescenceConfig::new(attempt!(str_arg(delta_name)))
        };
        match delta_closure(s, &cfg) {
            Ok(d) => put_handle(out, d),
            Err(e) => from_core(&e),
        }
    })
}

/// Subset construction.
///
/// # Safety
/// `a` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ia_determinize(a: *const IaAutomaton, out: *mut *mut IaAutomaton) -> IaStatus {
    guard(|| {
        if out.is_null() {
            return fail(IaStatus::NullArgument, "null out pointer");
        }
        *out = ptr::null_mut();
        put_handle(out, determinize(attempt!(handle(a))))
    })
}

/// Subset construction keeping only inputs enabled in every member state.
///
/// # Safety
/// `a` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ia_determinize_iu(a: *const IaAutomaton, out: *mut *mut IaAutomaton) -> IaStatus {
    guard(|| {
        if out.is_null() {
            return fail(IaStatus::NullArgument, "null out pointer");
        }
        *out = ptr::null_mut();
        put_handle(out, determinize_iu(attempt!(handle(a))))
    })
}

/// Checks `relation` (`if`, `iuoe`, `equiv-if`, `uioco`, `ioco`, `as`,
/// `atc`, `tb` or `all`) between `implementation` and `specification`.
/// Writes the verdict as JSON to `*json_out` and, when `verdict_out` is not
/// null, its status. For `all` the JSON is the full report and the status
/// is `Holds` when the implications between the relations are respected;
/// otherwise `Internal` is returned together with the report.
///
/// # Safety
/// Handles must be live, `relation` NUL-terminated, `json_out` valid and
/// `verdict_out` null or valid.
#[no_mangle]
pub unsafe extern "C" fn ia_check(
    relation: *const c_char,
    implementation: *const IaAutomaton,
    specification: *const IaAutomaton,
    depth: usize,
    verdict_out: *mut IaVerdict,
    json_out: *mut *mut c_char,
) -> IaStatus {
    guard(|| {
        if json_out.is_null() {
            return fail(IaStatus::NullArgument, "null out pointer");
        }
        *json_out = ptr::null_mut();
        let name = attempt!(str_arg(relation));
        let s1 = attempt!(handle(implementation));
        let s2 = attempt!(handle(specification));
        let cfg = QuiescenceConfig::default();
        if name == "all" {
            let opts = AllOptions {
                depth,
                budget: DEFAULT_BUDGET,
            };
            return match check_all(s1, s2, &cfg, opts) {
                Ok(report) => {
                    if !verdict_out.is_null() {
                        *verdict_out = IaVerdict::Holds;
                    }
                    let code = put_string(json_out, report.to_json());
                    if code == IaStatus::Ok && !report.consistent {
                        return fail(IaStatus::Internal, &report.violations.join("; "));
                    }
                    code
                }
                Err(e) => from_core(&e),
            };
        }
        let Some(rel) = Relation::from_name(name) else {
            return fail(IaStatus::UnknownRelation, &format!("unknown relation `{name}`"));
        };
        match check_relation(s1, s2, &cfg, rel, depth, DEFAULT_BUDGET) {
            Ok(v) => {
                if !verdict_out.is_null() {
                    *verdict_out = match v.status {
                        Status::Holds => IaVerdict::Holds,
                        Status::Fails => IaVerdict::Fails,
                        Status::Inconclusive => IaVerdict::Inconclusive,
                    };
                }
                put_string(json_out, v.to_json())
            }
            Err(e) => from_core(&e),
        }
    })
}

/// Message for the last failure on this thread; empty if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ia_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ia_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
