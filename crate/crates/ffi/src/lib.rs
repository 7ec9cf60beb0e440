//! C ABI over the ompar pipeline.
//!
//! Every fallible call returns an [`OmparStatus`]; on failure the message
//! is available from [`ompar_last_error_message`] on the same thread.
//! Strings handed out must be released with [`ompar_string_free`],
//! sources with [`ompar_source_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ompar::analysis::CallPolicy;
use ompar::backend::OfflineBackend;
use ompar::pipeline::{
    analyze_source, loop_reports, parallelize_source, skipped_reports, FileAnalysis, PipelineOptions,
};
use ompar::prompting::IclCorpus;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmparStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    PipelineError = 4,
    Panic = 5,
}

/// A parsed and analyzed translation unit.
pub struct OmparSource {
    analysis: FileAnalysis,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: OmparStatus, msg: impl Into<String>) -> OmparStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> OmparStatus) -> OmparStatus {
    clear_error();
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(OmparStatus::Panic, "internal panic"))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Parse and analyze NUL-terminated C source.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ompar_source_parse(text: *const c_char, out: *mut *mut OmparSource) -> OmparStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return fail(OmparStatus::NullArgument, "null argument");
        }
        // SAFETY: caller guarantees a NUL-terminated string
        let Ok(text) = unsafe { CStr::from_ptr(text) }.to_str() else {
            return fail(OmparStatus::InvalidUtf8, "source is not valid UTF-8");
        };
        match analyze_source(text, &CallPolicy::default()) {
            Ok(analysis) => {
                // SAFETY: checked non-null above
                unsafe { *out = Box::into_raw(Box::new(OmparSource { analysis })) };
                OmparStatus::Ok
            }
            Err(e) => fail(OmparStatus::ParseError, e.to_string()),
        }
    })
}

/// Release a source. Null is ignored.
///
/// # Safety
/// `src` must come from [`ompar_source_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ompar_source_free(src: *mut OmparSource) {
    if !src.is_null() {
        // SAFETY: pointer came from Box::into_raw
        drop(unsafe { Box::from_raw(src) });
    }
}

/// Number of canonical loops found.
///
/// # Safety
/// `src` must be a live source; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ompar_source_loop_count(src: *const OmparSource, out: *mut usize) -> OmparStatus {
    guard(|| {
        if src.is_null() || out.is_null() {
            return fail(OmparStatus::NullArgument, "null argument");
        }
        // SAFETY: caller guarantees liveness
        unsafe { *out = (*src).analysis.scan.loops.len() };
        OmparStatus::Ok
    })
}

/// Per-loop analysis and verdicts as JSON.
///
/// # Safety
/// `src` must be a live source; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ompar_analyze_json(src: *const OmparSource, out_json: *mut *mut c_char) -> OmparStatus {
    guard(|| {
        if src.is_null() || out_json.is_null() {
            return fail(OmparStatus::NullArgument, "null argument");
        }
        // SAFETY: caller guarantees liveness
        let fa = unsafe { &(*src).analysis };
        let v = serde_json::json!({
            "loops": loop_reports(fa, true, None),
            "skipped": skipped_reports(fa),
        });
        // SAFETY: checked non-null above
        unsafe { *out_json = into_c_string(v.to_string()) };
        OmparStatus::Ok
    })
}

/// Rewrite with the offline backend and the bundled corpus.
///
/// # Safety
/// `src` must be a live source; both out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn ompar_parallelize_offline(
    src: *const OmparSource,
    out_text: *mut *mut c_char,
    out_injected: *mut usize,
) -> OmparStatus {
    guard(|| {
        if src.is_null() || out_text.is_null() || out_injected.is_null() {
            return fail(OmparStatus::NullArgument, "null argument");
        }
        // SAFETY: caller guarantees liveness
        let text = unsafe { &(*src).analysis.source.text };
        match parallelize_source(
            text,
            "input.c",
            &IclCorpus::bundled(),
            &OfflineBackend,
            &PipelineOptions::default(),
        ) {
            Ok(o) => {
                // SAFETY: checked non-null above
                unsafe {
                    *out_injected = o.injected();
                    *out_text = into_c_string(o.output_text);
                }
                OmparStatus::Ok
            }
            Err(e) => fail(OmparStatus::PipelineError, e.to_string()),
        }
    })
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ompar_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: pointer came from CString::into_raw
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Message for the last failure on this thread, or null. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn ompar_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, statically allocated.
#[no_mangle]
pub extern "C" fn ompar_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
