// SPDX-License-Identifier: Apache-2.0
//! C ABI over `pgr`.
//!
//! Graphs and rule sets are opaque heap handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call returns
//! a [`PgrStatus`]; on failure a message is available from
//! [`pgr_last_error_message`] on the same thread. Outputs are written only on
//! success. Strings returned by the library are released with
//! [`pgr_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pgr::io::{parse_document, parse_graph, serialize_graph};
use pgr::rewrite::{normalize, NormalizeError, RuleSet, Strategy};
use pgr::rule::default_map_cap;
use pgr::systems::{detect_deadlock, Verdict, WaitForError, WaitForNet};
use pgr::{apply_at, find_redexes, is_isomorphic, Graph};
use thiserror::Error;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PgrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    NotFound = 4,
    OutOfRange = 5,
    Rewrite = 6,
    StepLimit = 7,
    InvalidInput = 8,
    Panic = 9,
}

/// A graph handle.
pub struct PgrGraph(Graph);

/// An ordered set of rules.
pub struct PgrRuleSet(RuleSet);

#[derive(Debug, Error)]
enum FfiError {
    #[error("null pointer argument: {0}")]
    Null(&'static str),
    #[error("argument {0} is not valid UTF-8")]
    Utf8(&'static str),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    OutOfRange(String),
    #[error("{0}")]
    Rewrite(String),
    #[error("{0}")]
    StepLimit(String),
    #[error("{0}")]
    Invalid(String),
}

impl FfiError {
    fn status(&self) -> PgrStatus {
        match self {
            FfiError::Null(_) => PgrStatus::NullPointer,
            FfiError::Utf8(_) => PgrStatus::InvalidUtf8,
            FfiError::Parse(_) => PgrStatus::Parse,
            FfiError::NotFound(_) => PgrStatus::NotFound,
            FfiError::OutOfRange(_) => PgrStatus::OutOfRange,
            FfiError::Rewrite(_) => PgrStatus::Rewrite,
            FfiError::StepLimit(_) => PgrStatus::StepLimit,
            FfiError::Invalid(_) => PgrStatus::InvalidInput,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), FfiError>) -> PgrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PgrStatus::Ok
        }
        Ok(Err(e)) => {
            set_last_error(&e.to_string());
            e.status()
        }
        Err(_) => {
            set_last_error("internal panic");
            PgrStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &'static str) -> Result<&'a str, FfiError> {
    if p.is_null() {
        return Err(FfiError::Null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| FfiError::Utf8(name))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, FfiError> {
    p.as_ref().ok_or(FfiError::Null(name))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, FfiError> {
    p.as_mut().ok_or(FfiError::Null(name))
}

fn boxed_graph(g: Graph) -> *mut PgrGraph {
    Box::into_raw(Box::new(PgrGraph(g)))
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn pgr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn pgr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by the library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn pgr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses the text of a single graph.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pgr_graph_parse(text: *const c_char, out: *mut *mut PgrGraph) -> PgrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let g = parse_graph(str_arg(text, "text")?).map_err(|e| FfiError::Parse(e.to_string()))?;
        *out = boxed_graph(g);
        Ok(())
    })
}

/// Releases a graph. NULL is ignored.
///
/// # Safety
/// `g` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn pgr_graph_free(g: *mut PgrGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Writes the vertex and edge counts of `g`. Either output may be NULL.
///
/// # Safety
/// `g` must be a live handle; non-NULL outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn pgr_graph_size(g: *const PgrGraph, vertices: *mut usize, edges: *mut usize) -> PgrStatus {
    guard(|| {
        let g = &ref_arg(g, "g")?.0;
        if let Some(v) = vertices.as_mut() {
            *v = g.vertex_count();
        }
        if let Some(e) = edges.as_mut() {
            *e = g.edge_count();
        }
        Ok(())
    })
}

/// Serializes `g` under `name` in the text format.
///
/// # Safety
/// `g` must be a live handle, `name` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pgr_graph_to_text(g: *const PgrGraph, name: *const c_char, out: *mut *mut c_char) -> PgrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let text = serialize_graph(str_arg(name, "name")?, &ref_arg(g, "g")?.0);
        *out = CString::new(text).map_err(|e| FfiError::Invalid(e.to_string()))?.into_raw();
        Ok(())
    })
}

/// Sets `*out` to whether `a` and `b` are isomorphic.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pgr_graph_isomorphic(a: *const PgrGraph, b: *const PgrGraph, out: *mut bool) -> PgrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = is_isomorphic(&ref_arg(a, "a")?.0, &ref_arg(b, "b")?.0);
        Ok(())
    })
}

/// Parses rules from `text`. With a NULL `system` every rule of the text is
/// taken in file order, otherwise the named system.
///
/// # Safety
/// `text` must be NUL-terminated, `system` NULL or NUL-terminated, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn pgr_ruleset_parse(
    text: *const c_char,
    system: *const c_char,
    out: *mut *mut PgrRuleSet,
) -> PgrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let doc = parse_document(str_arg(text, "text")?).map_err(|e| FfiError::Parse(e.to_string()))?;
        let set = if system.is_null() {
            doc.all_rules()
        } else {
            let name = str_arg(system, "system")?;
            doc.system(name).ok_or_else(|| FfiError::NotFound(format!("no system named {name}")))?
        };
        *out = Box::into_raw(Box::new(PgrRuleSet(set)));
        Ok(())
    })
}

/// Releases a rule set. NULL is ignored.
///
/// # Safety
/// `rs` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn pgr_ruleset_free(rs: *mut PgrRuleSet) {
    if !rs.is_null() {
        drop(Box::from_raw(rs));
    }
}

/// Number of rules in `rs`, or 0 for NULL.
///
/// # Safety
/// `rs` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pgr_ruleset_len(rs: *const PgrRuleSet) -> usize {
    rs.as_ref().map_or(0, |r| r.0.rules.len())
}

unsafe fn rule_arg<'a>(rs: *const PgrRuleSet, name: *const c_char) -> Result<&'a pgr::QuasiRule, FfiError> {
    let rs = &ref_arg(rs, "rules")?.0;
    let name = str_arg(name, "rule")?;
    rs.get(name).ok_or_else(|| FfiError::NotFound(format!("no rule named {name}")))
}

/// Counts the redexes of rule `rule` of `rs` in `g`.
///
/// # Safety
/// Handles must be live, `rule` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pgr_count_redexes(
    g: *const PgrGraph,
    rs: *const PgrRuleSet,
    rule: *const c_char,
    out: *mut usize,
) -> PgrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let r = rule_arg(rs, rule)?;
        *out = find_redexes(&ref_arg(g, "g")?.0, r, default_map_cap()).redexes.len();
        Ok(())
    })
}

/// Applies redex number `index` of rule `rule` and returns the result as a
/// new graph. `g` is left unchanged.
///
/// # Safety
/// Handles must be live, `rule` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pgr_apply(
    g: *const PgrGraph,
    rs: *const PgrRuleSet,
    rule: *const c_char,
    index: usize,
    out: *mut *mut PgrGraph,
) -> PgrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let host = &ref_arg(g, "g")?.0;
        let r = rule_arg(rs, rule)?;
        let found = find_redexes(host, r, default_map_cap());
        let redex = found
            .redexes
            .get(index)
            .ok_or_else(|| FfiError::OutOfRange(format!("redex {index} of {}", found.redexes.len())))?;
        let (result, _) = apply_at(host, redex).map_err(|e| FfiError::Rewrite(e.to_string()))?;
        *out = boxed_graph(result);
        Ok(())
    })
}

/// Rewrites `g` with `rs` until no rule applies, taking the first redex of
/// the first applicable rule each time. `steps` may be NULL.
///
/// # Safety
/// Handles must be live; `out` writable; `steps` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn pgr_normalize(
    g: *const PgrGraph,
    rs: *const PgrRuleSet,
    max_steps: usize,
    out: *mut *mut PgrGraph,
    steps: *mut usize,
) -> PgrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let nf = normalize(&ref_arg(g, "g")?.0, &ref_arg(rs, "rules")?.0, Strategy::First, max_steps).map_err(
            |e| match e {
                NormalizeError::StepLimitReached { .. } => FfiError::StepLimit(e.to_string()),
                NormalizeError::Rewrite(e) => FfiError::Rewrite(e.to_string()),
            },
        )?;
        if let Some(s) = steps.as_mut() {
            *s = nf.trace.len();
        }
        *out = boxed_graph(nf.graph);
        Ok(())
    })
}

/// Decides a wait-for graph: `*deadlocked` is set to true if it is
/// deadlocked. Fails with `InvalidInput` if `g` is not a wait-for graph.
///
/// # Safety
/// `g` must be a live handle; `deadlocked` writable.
#[no_mangle]
pub unsafe extern "C" fn pgr_detect_deadlock(g: *const PgrGraph, max_steps: usize, deadlocked: *mut bool) -> PgrStatus {
    guard(|| {
        let out = out_arg(deadlocked, "deadlocked")?;
        let net = WaitForNet::new(ref_arg(g, "g")?.0.clone()).map_err(|e| FfiError::Invalid(e.to_string()))?;
        let report = detect_deadlock(&net, max_steps).map_err(|e| match e {
            WaitForError::StepLimitReached { .. } => FfiError::StepLimit(e.to_string()),
            other => FfiError::Rewrite(other.to_string()),
        })?;
        *out = report.verdict == Verdict::Deadlocked;
        Ok(())
    })
}
