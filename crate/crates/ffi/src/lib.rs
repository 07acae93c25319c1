//! C ABI over the trivalent checker.
//!
//! A check returns an opaque `TvResult` owning the rendered documents.
//! Strings handed out by the library stay valid until the owning result is
//! freed (or, for `tv_last_error`, until the next call on the same thread).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use trivalent::cli::{check_sources, render_check, Emit, Format, Sources, EXIT_INPUT};
use trivalent::engine::VerdictValue;

/// Status of every fallible call. Input and internal errors share their
/// values with the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TvStatus {
    Ok = 0,
    InputError = 2,
    InternalError = 3,
    NullArgument = 4,
    InvalidUtf8 = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TvVerdict {
    True = 0,
    False = 1,
    Maybe = 2,
}

/// Include the proof of an empty product.
pub const TV_EMIT_PROOF: u32 = 1;
/// Include the counterexample lasso.
pub const TV_EMIT_COUNTEREXAMPLE: u32 = 2;
/// Include both product graphs.
pub const TV_EMIT_PRODUCT: u32 = 4;
/// Treat validation warnings as errors.
pub const TV_STRICT_VALIDATE: u32 = 8;

/// Opaque result of `tv_check`.
pub struct TvResult {
    verdict: TvVerdict,
    json: CString,
    markdown: CString,
    plain: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c_string(msg)));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

// Rendered documents never contain NUL; strip defensively anyway.
fn c_string(s: &str) -> CString {
    CString::new(s.replace('\0', "")).expect("NUL bytes removed")
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, TvStatus> {
    if p.is_null() {
        set_last_error(&format!("{what} is null"));
        return Err(TvStatus::NullArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_last_error(&format!("{what} is not valid UTF-8"));
        TvStatus::InvalidUtf8
    })
}

fn emit_from(flags: u32) -> Emit {
    let selected = flags & (TV_EMIT_PROOF | TV_EMIT_COUNTEREXAMPLE | TV_EMIT_PRODUCT);
    if selected == 0 {
        return Emit::default();
    }
    Emit {
        proof: selected & TV_EMIT_PROOF != 0,
        counterexample: selected & TV_EMIT_COUNTEREXAMPLE != 0,
        product: selected & TV_EMIT_PRODUCT != 0,
    }
}

unsafe fn check_inner(
    model_json: *const c_char,
    property: *const c_char,
    automaton_json: *const c_char,
    flags: u32,
) -> Result<TvResult, TvStatus> {
    let model = text(model_json, "model")?;
    let property = text(property, "property")?;
    let automaton = if automaton_json.is_null() { None } else { Some(text(automaton_json, "automaton")?) };
    let src = Sources {
        model_name: "model",
        model,
        property,
        automaton,
        strict_validate: flags & TV_STRICT_VALIDATE != 0,
    };
    let doc = check_sources(&src, emit_from(flags)).map_err(|f| {
        set_last_error(&f.diagnostics.join("\n"));
        if f.status == EXIT_INPUT {
            TvStatus::InputError
        } else {
            TvStatus::InternalError
        }
    })?;
    let verdict = match doc.verdict {
        VerdictValue::True => TvVerdict::True,
        VerdictValue::False => TvVerdict::False,
        VerdictValue::Maybe => TvVerdict::Maybe,
    };
    Ok(TvResult {
        verdict,
        json: c_string(&render_check(&doc, Format::Json)),
        markdown: c_string(&render_check(&doc, Format::Markdown)),
        plain: c_string(&render_check(&doc, Format::Plain)),
    })
}

/// Checks `property` on the model document `model_json`.
///
/// `automaton_json` may be null; otherwise it replaces the automaton
/// translated from the negated property. `flags` combines the `TV_*`
/// constants; with no emit flag the proof and counterexample are included.
/// On success `*out` receives a result to release with `tv_result_free`;
/// on failure `*out` is set to null and `tv_last_error` describes why.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be null or
/// point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn tv_check(
    model_json: *const c_char,
    property: *const c_char,
    automaton_json: *const c_char,
    flags: u32,
    out: *mut *mut TvResult,
) -> TvStatus {
    clear_last_error();
    if out.is_null() {
        set_last_error("out is null");
        return TvStatus::NullArgument;
    }
    *out = ptr::null_mut();
    let run = catch_unwind(AssertUnwindSafe(|| check_inner(model_json, property, automaton_json, flags)));
    match run {
        Ok(Ok(result)) => {
            *out = Box::into_raw(Box::new(result));
            TvStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => {
            set_last_error("internal panic");
            TvStatus::Panic
        }
    }
}

/// Writes the verdict of `result` to `*verdict`.
///
/// # Safety
/// `result` must be null or a live result from `tv_check`; `verdict` must be
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn tv_result_verdict(result: *const TvResult, verdict: *mut TvVerdict) -> TvStatus {
    if result.is_null() || verdict.is_null() {
        set_last_error("null argument");
        return TvStatus::NullArgument;
    }
    *verdict = (*result).verdict;
    TvStatus::Ok
}

/// The JSON result document, or null when `result` is null.
///
/// # Safety
/// `result` must be null or a live result from `tv_check`.
#[no_mangle]
pub unsafe extern "C" fn tv_result_json(result: *const TvResult) -> *const c_char {
    result.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// The markdown rendering, or null when `result` is null.
///
/// # Safety
/// `result` must be null or a live result from `tv_check`.
#[no_mangle]
pub unsafe extern "C" fn tv_result_markdown(result: *const TvResult) -> *const c_char {
    result.as_ref().map_or(ptr::null(), |r| r.markdown.as_ptr())
}

/// The plain-text rendering, or null when `result` is null.
///
/// # Safety
/// `result` must be null or a live result from `tv_check`.
#[no_mangle]
pub unsafe extern "C" fn tv_result_plain(result: *const TvResult) -> *const c_char {
    result.as_ref().map_or(ptr::null(), |r| r.plain.as_ptr())
}

/// Releases a result. Null is ignored.
///
/// # Safety
/// `result` must be null or a result from `tv_check` not freed before.
#[no_mangle]
pub unsafe extern "C" fn tv_result_free(result: *mut TvResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Message of the last failed call on this thread, or null.
#[no_mangle]
pub extern "C" fn tv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn tv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn emit_flags_default_to_proof_and_counterexample() {
        assert_eq!(emit_from(0), Emit::default());
        assert_eq!(emit_from(TV_STRICT_VALIDATE), Emit::default());
        assert_eq!(emit_from(TV_EMIT_PRODUCT), Emit { proof: false, counterexample: false, product: true });
    }

    #[test]
    fn interior_nul_is_stripped() {
        assert_eq!(c_string("a\0b").to_bytes(), b"ab");
    }

    #[test]
    fn version_is_terminated() {
        let v = unsafe { CStr::from_ptr(tv_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
