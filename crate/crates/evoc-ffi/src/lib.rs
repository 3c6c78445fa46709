//! C ABI for the evoc simulator.
//!
//! Conventions: handles are opaque pointers created and freed here; every
//! fallible call returns an [`EvocStatus`]; on failure a thread-local message
//! is retrievable via [`evoc_last_error_message`]. Strings returned as
//! `char*` are owned by the caller and must be released with
//! [`evoc_string_free`].

use evoc::fitness::{oracle_max_and_argmax, HeadRule};
use evoc::metrics::TimeSeries;
use evoc::{SimParams, Simulation};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Status code of a C API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvocStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Parameters could not be parsed or failed validation.
    InvalidConfig = 3,
    /// An index argument was out of range.
    IndexOutOfRange = 4,
    /// The provided buffer is too small.
    BufferTooSmall = 5,
    /// An internal panic was caught at the boundary.
    Panic = 6,
}

/// Head-term variant of the scoring rule.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvocHeadRule {
    /// Reward a stationary head (default).
    Prose = 0,
    /// Reward a moving head.
    Literal = 1,
}

impl From<EvocHeadRule> for HeadRule {
    fn from(rule: EvocHeadRule) -> HeadRule {
        match rule {
            EvocHeadRule::Prose => HeadRule::Prose,
            EvocHeadRule::Literal => HeadRule::Literal,
        }
    }
}

/// Opaque simulation parameter set.
pub struct EvocParams {
    inner: SimParams,
}

/// Opaque result of one run: the per-iteration records and the final
/// per-agent invention probabilities.
pub struct EvocSeries {
    inner: TimeSeries,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("invalid error message").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

/// Message of the most recent failure on this thread, or null. The pointer
/// is valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn evoc_last_error_message() -> *const c_char {
    LAST_ERROR
        .with(|slot| slot.borrow().as_ref().map(|m| m.as_ptr()))
        .unwrap_or(ptr::null())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn evoc_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Frees a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must have been returned by a function of this library and not freed
/// before.
#[no_mangle]
pub unsafe extern "C" fn evoc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// New parameter handle with the default parameter set.
#[no_mangle]
pub extern "C" fn evoc_params_new() -> *mut EvocParams {
    Box::into_raw(Box::new(EvocParams {
        inner: SimParams::default(),
    }))
}

/// Parses a parameter handle from a JSON object. Absent fields keep their
/// defaults; unknown fields are rejected. On success writes the new handle
/// to `out`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn evoc_params_from_json(
    json: *const c_char,
    out: *mut *mut EvocParams,
) -> EvocStatus {
    if json.is_null() || out.is_null() {
        return EvocStatus::NullArgument;
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(t) => t,
        Err(_) => return EvocStatus::InvalidUtf8,
    };
    match serde_json::from_str::<SimParams>(text) {
        Ok(params) => match params.validate() {
            Ok(()) => {
                clear_last_error();
                *out = Box::into_raw(Box::new(EvocParams { inner: params }));
                EvocStatus::Ok
            }
            Err(e) => {
                set_last_error(e.to_string());
                EvocStatus::InvalidConfig
            }
        },
        Err(e) => {
            set_last_error(e.to_string());
            EvocStatus::InvalidConfig
        }
    }
}

/// Serializes a parameter handle to a JSON string owned by the caller.
/// Returns null on a null handle.
///
/// # Safety
/// `params` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn evoc_params_to_json(params: *const EvocParams) -> *mut c_char {
    let Some(params) = params.as_ref() else {
        return ptr::null_mut();
    };
    let json = serde_json::to_string(&params.inner).expect("params serialize");
    CString::new(json).expect("no interior NUL").into_raw()
}

/// Frees a parameter handle. Null is a no-op.
///
/// # Safety
/// `params` must be a live handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn evoc_params_free(params: *mut EvocParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Runs one seeded simulation to completion. On success writes a series
/// handle to `out`. The run is a pure function of the parameters.
///
/// # Safety
/// `params` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn evoc_run(
    params: *const EvocParams,
    out: *mut *mut EvocSeries,
) -> EvocStatus {
    if params.is_null() || out.is_null() {
        return EvocStatus::NullArgument;
    }
    let params = (*params).inner;
    match catch_unwind(AssertUnwindSafe(|| Simulation::run(params))) {
        Ok(Ok(series)) => {
            clear_last_error();
            *out = Box::into_raw(Box::new(EvocSeries { inner: series }));
            EvocStatus::Ok
        }
        Ok(Err(e)) => {
            set_last_error(e.to_string());
            EvocStatus::InvalidConfig
        }
        Err(_) => {
            set_last_error("internal panic during run".to_string());
            EvocStatus::Panic
        }
    }
}

/// Number of per-iteration records in the series (iterations + 1; record 0
/// is the initial state). Zero on a null handle.
///
/// # Safety
/// `series` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn evoc_series_record_count(series: *const EvocSeries) -> usize {
    series.as_ref().map_or(0, |s| s.inner.records.len())
}

/// Number of agents in the simulated society. Zero on a null handle.
///
/// # Safety
/// `series` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn evoc_series_agent_count(series: *const EvocSeries) -> usize {
    series.as_ref().map_or(0, |s| s.inner.final_p_create.len())
}

unsafe fn read_record_field(
    series: *const EvocSeries,
    index: usize,
    out: *mut f64,
    field: impl Fn(&evoc::metrics::IterationRecord) -> f64,
) -> EvocStatus {
    let Some(series) = series.as_ref() else {
        return EvocStatus::NullArgument;
    };
    if out.is_null() {
        return EvocStatus::NullArgument;
    }
    match series.inner.records.get(index) {
        Some(record) => {
            *out = field(record);
            EvocStatus::Ok
        }
        None => EvocStatus::IndexOutOfRange,
    }
}

/// Mean fitness at a record index.
///
/// # Safety
/// `series` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn evoc_series_mean_fitness(
    series: *const EvocSeries,
    index: usize,
    out: *mut f64,
) -> EvocStatus {
    read_record_field(series, index, out, |r| r.mean_fitness)
}

/// Number of distinct implemented chains at a record index.
///
/// # Safety
/// `series` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn evoc_series_diversity(
    series: *const EvocSeries,
    index: usize,
    out: *mut f64,
) -> EvocStatus {
    read_record_field(series, index, out, |r| r.diversity as f64)
}

/// Mean invention probability at a record index.
///
/// # Safety
/// `series` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn evoc_series_mean_p_create(
    series: *const EvocSeries,
    index: usize,
    out: *mut f64,
) -> EvocStatus {
    read_record_field(series, index, out, |r| r.mean_p_create)
}

/// Share of agents with p(C) <= 0.1 at a record index.
///
/// # Safety
/// `series` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn evoc_series_frac_imitators(
    series: *const EvocSeries,
    index: usize,
    out: *mut f64,
) -> EvocStatus {
    read_record_field(series, index, out, |r| r.frac_imitators)
}

/// Share of agents with p(C) >= 0.9 at a record index.
///
/// # Safety
/// `series` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn evoc_series_frac_creators(
    series: *const EvocSeries,
    index: usize,
    out: *mut f64,
) -> EvocStatus {
    read_record_field(series, index, out, |r| r.frac_creators)
}

/// Copies the final per-agent invention probabilities into `buffer`
/// (capacity `len`); fails with `BufferTooSmall` if it cannot hold them all.
///
/// # Safety
/// `series` must be a live handle; `buffer` must point to at least `len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn evoc_series_final_p_create(
    series: *const EvocSeries,
    buffer: *mut f64,
    len: usize,
) -> EvocStatus {
    let Some(series) = series.as_ref() else {
        return EvocStatus::NullArgument;
    };
    if buffer.is_null() {
        return EvocStatus::NullArgument;
    }
    let values = &series.inner.final_p_create;
    if len < values.len() {
        return EvocStatus::BufferTooSmall;
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buffer, values.len());
    EvocStatus::Ok
}

/// Serializes the whole series (parameters, records, final probabilities) to
/// a JSON string owned by the caller. Returns null on a null handle.
///
/// # Safety
/// `series` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn evoc_series_to_json(series: *const EvocSeries) -> *mut c_char {
    let Some(series) = series.as_ref() else {
        return ptr::null_mut();
    };
    let json = serde_json::to_string(&series.inner).expect("series serialize");
    CString::new(json).expect("no interior NUL").into_raw()
}

/// Frees a series handle. Null is a no-op.
///
/// # Safety
/// `series` must be a live handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn evoc_series_free(series: *mut EvocSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Exhaustively scans the 729-action space under the given head rule and
/// writes the maximum single-action fitness and the number of maximizers.
///
/// # Safety
/// `out_max` and `out_count` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn evoc_oracle(
    head_rule: EvocHeadRule,
    out_max: *mut f64,
    out_count: *mut usize,
) -> EvocStatus {
    if out_max.is_null() || out_count.is_null() {
        return EvocStatus::NullArgument;
    }
    let (max, argmax) = oracle_max_and_argmax(head_rule.into());
    *out_max = max.value();
    *out_count = argmax.len();
    EvocStatus::Ok
}
