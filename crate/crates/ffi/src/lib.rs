//! C ABI over `concurrence_lab`.
//!
//! Specs and states are opaque heap handles released with their `*_free`
//! function. Every fallible call returns a [`ClStatus`]; on failure the
//! message is available from [`cl_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use concurrence_lab::concurrence::{
    concurrence_pure, spec_to_json, CoefficientsAlpha, ConcurrenceSpec, SpecForm, SpecJson,
};
use concurrence_lab::monotonicity::{gap_direct, gap_expanded, search, sufficient_criterion, SearchConfig};
use concurrence_lab::qstate::PureState;
use concurrence_lab::Error;
use num_complex::Complex64;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidSpec = 2,
    DimensionMismatch = 3,
    InvalidArgument = 4,
    Json = 5,
    Inapplicable = 6,
    Panic = 7,
}

/// Output table for [`cl_spec_to_json`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClSpecForm {
    Alpha = 0,
    P = 1,
    Both = 2,
}

/// Evaluation route for [`cl_gap`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClGapMethod {
    Direct = 0,
    Expanded = 1,
}

/// Opaque concurrence spec.
pub struct ClSpec(ConcurrenceSpec);

/// Opaque pure state.
pub struct ClState(PureState);

/// Outcome of [`cl_search`].
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ClSearchResult {
    pub min_gap: f64,
    /// Nonzero when `min_gap` is below the tolerance.
    pub violated: i32,
    /// 0-based.
    pub flag_party: usize,
    pub theta: f64,
    pub evaluations: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

fn status_of(e: &Error) -> ClStatus {
    match e {
        Error::InvalidSpec(_)
        | Error::NotPositive { .. }
        | Error::ZeroSpec
        | Error::NegativeRadicand(_)
        | Error::SpecNotSufficient => ClStatus::InvalidSpec,
        Error::DimensionMismatch { .. } | Error::InvalidDims(_) => ClStatus::DimensionMismatch,
        Error::Json(_) => ClStatus::Json,
        Error::Inapplicable(_) => ClStatus::Inapplicable,
        _ => ClStatus::InvalidArgument,
    }
}

/// Runs `f`, recording any error or panic for [`cl_last_error`].
fn guard<F: FnOnce() -> Result<(), ClStatus>>(f: F) -> ClStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            ClStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            ClStatus::Panic
        }
    }
}

fn lib<T>(r: concurrence_lab::Result<T>) -> Result<T, ClStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), ClStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        Err(ClStatus::NullPointer)
    } else {
        Ok(())
    }
}

/// # Safety
/// `p` must be null or point to a NUL-terminated string.
unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, ClStatus> {
    non_null(p, what)?;
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not UTF-8"));
        ClStatus::InvalidArgument
    })
}

/// # Safety
/// `p` must be null only when `len == 0`, else point to `len` readable values.
unsafe fn read_slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], ClStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    non_null(p, what)?;
    Ok(slice::from_raw_parts(p, len))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn cl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses a spec from JSON (`{"N": .., "alpha": {..}}` and/or `"p"`).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_spec_from_json(json: *const c_char, out: *mut *mut ClSpec) -> ClStatus {
    guard(|| {
        non_null(out, "out")?;
        let text = read_str(json, "json")?;
        let j: SpecJson = lib(serde_json::from_str(text).map_err(Error::from))?;
        let spec = lib(j.to_spec())?;
        *out = Box::into_raw(Box::new(ClSpec(spec)));
        Ok(())
    })
}

/// Builds a spec from `2^n` values of `α`, indexed by subset bitmask: bit
/// `k − 1` is set when party `k` is in the subset.
///
/// # Safety
/// `alpha` must point to `len` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cl_spec_from_alpha(
    n: usize,
    alpha: *const f64,
    len: usize,
    out: *mut *mut ClSpec,
) -> ClStatus {
    guard(|| {
        non_null(out, "out")?;
        let values = read_slice(alpha, len, "alpha")?;
        let a = lib(CoefficientsAlpha::new(n, values.to_vec()))?;
        let spec = lib(ConcurrenceSpec::from_alpha(a))?;
        *out = Box::into_raw(Box::new(ClSpec(spec)));
        Ok(())
    })
}

/// The symmetric concurrence on `n` parties.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cl_spec_symmetric(n: usize, out: *mut *mut ClSpec) -> ClStatus {
    guard(|| {
        non_null(out, "out")?;
        let spec = lib(ConcurrenceSpec::symmetric(n))?;
        *out = Box::into_raw(Box::new(ClSpec(spec)));
        Ok(())
    })
}

/// Number of parties, or 0 for a null handle.
///
/// # Safety
/// `spec` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cl_spec_parties(spec: *const ClSpec) -> usize {
    spec.as_ref().map_or(0, |s| s.0.n())
}

/// Writes 1 to `out` if every nontrivial `α` is non-positive, else 0.
///
/// # Safety
/// `spec` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cl_spec_sufficient(spec: *const ClSpec, out: *mut i32) -> ClStatus {
    guard(|| {
        non_null(spec, "spec")?;
        non_null(out, "out")?;
        *out = i32::from(sufficient_criterion(&(*spec).0));
        Ok(())
    })
}

/// Serializes a spec; free the string with [`cl_string_free`].
///
/// # Safety
/// `spec` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cl_spec_to_json(spec: *const ClSpec, form: ClSpecForm, out: *mut *mut c_char) -> ClStatus {
    guard(|| {
        non_null(spec, "spec")?;
        non_null(out, "out")?;
        let form = match form {
            ClSpecForm::Alpha => SpecForm::Alpha,
            ClSpecForm::P => SpecForm::P,
            ClSpecForm::Both => SpecForm::Both,
        };
        let text = lib(spec_to_json(&(*spec).0, form))?;
        *out = CString::new(text).map_err(|_| ClStatus::Json)?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `spec` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cl_spec_free(spec: *mut ClSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Builds a state from row-major amplitudes (party 1 slowest).
///
/// # Safety
/// `dims` must point to `n_parties` values, `re` and `im` to `len` doubles
/// each, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cl_state_new(
    dims: *const usize,
    n_parties: usize,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut ClState,
) -> ClStatus {
    guard(|| {
        non_null(out, "out")?;
        let dims = read_slice(dims, n_parties, "dims")?;
        let re = read_slice(re, len, "re")?;
        let im = read_slice(im, len, "im")?;
        let amps = re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect();
        let s = lib(PureState::new(dims.to_vec(), amps))?;
        *out = Box::into_raw(Box::new(ClState(s)));
        Ok(())
    })
}

/// Parses `{"dims": [..], "re": [..], "im": [..]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cl_state_from_json(json: *const c_char, out: *mut *mut ClState) -> ClStatus {
    guard(|| {
        non_null(out, "out")?;
        let text = read_str(json, "json")?;
        let s: PureState = lib(serde_json::from_str(text).map_err(Error::from))?;
        *out = Box::into_raw(Box::new(ClState(s)));
        Ok(())
    })
}

/// Total Hilbert-space dimension, or 0 for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cl_state_dim(state: *const ClState) -> usize {
    state.as_ref().map_or(0, |s| s.0.dim())
}

/// # Safety
/// `state` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cl_state_free(state: *mut ClState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Pure-state concurrence.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cl_concurrence(spec: *const ClSpec, state: *const ClState, out: *mut f64) -> ClStatus {
    guard(|| {
        non_null(spec, "spec")?;
        non_null(state, "state")?;
        non_null(out, "out")?;
        *out = lib(concurrence_pure(&(*spec).0, &(*state).0))?;
        Ok(())
    })
}

/// `C(Ξ) − |a|²C(ψ) − |b|²C(φ)` with a qubit flag on `flag_party` (0-based).
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cl_gap(
    spec: *const ClSpec,
    psi: *const ClState,
    phi: *const ClState,
    a_re: f64,
    a_im: f64,
    b_re: f64,
    b_im: f64,
    flag_party: usize,
    method: ClGapMethod,
    out: *mut f64,
) -> ClStatus {
    guard(|| {
        non_null(spec, "spec")?;
        non_null(psi, "psi")?;
        non_null(phi, "phi")?;
        non_null(out, "out")?;
        let (a, b) = (Complex64::new(a_re, a_im), Complex64::new(b_re, b_im));
        let f = match method {
            ClGapMethod::Direct => gap_direct,
            ClGapMethod::Expanded => gap_expanded,
        };
        *out = lib(f(&(*spec).0, &(*psi).0, &(*phi).0, a, b, flag_party))?.gap;
        Ok(())
    })
}

/// Random-restart violation search. A negative `flag_party` probes the
/// default set of flag parties.
///
/// # Safety
/// `spec` must be live, `dims` must point to `n_parties` values and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn cl_search(
    spec: *const ClSpec,
    dims: *const usize,
    n_parties: usize,
    restarts: usize,
    max_iters: usize,
    seed: u64,
    flag_party: i64,
    out: *mut ClSearchResult,
) -> ClStatus {
    guard(|| {
        non_null(spec, "spec")?;
        non_null(out, "out")?;
        let dims = read_slice(dims, n_parties, "dims")?;
        let cfg = SearchConfig {
            restarts,
            max_iters,
            seed,
            flag_party: usize::try_from(flag_party).ok(),
            ..Default::default()
        };
        let r = lib(search(&(*spec).0, dims, &cfg))?;
        *out = ClSearchResult {
            min_gap: r.min_gap(),
            violated: i32::from(r.min_gap() < -cfg.tolerance),
            flag_party: r.best.flag_party,
            theta: r.best.theta,
            evaluations: r.evaluations,
        };
        Ok(())
    })
}
