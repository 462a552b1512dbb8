//! C ABI over `bcbounds`.
//!
//! Every fallible function returns a [`BcStatus`] and writes its results
//! through out-pointers. On failure the message is kept per thread and can be
//! read with [`bc_last_error_message`]. Strings handed out by this library
//! must be released with [`bc_string_free`] and systems with
//! [`bc_system_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::{c_char, c_double};

use bcbounds::paper::{paper_instance, verify_instance};
use bcbounds::rational::{fmt_exact, to_f64};
use bcbounds::report::BoundKind;
use bcbounds::search::{search_with_includes, SearchConfig};
use bcbounds::{Error, EventSystem};

/// Result codes. The nonzero values shared with the command-line tool carry
/// the same meaning there.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcStatus {
    Ok = 0,
    VerificationFailed = 1,
    ParseError = 2,
    DomainError = 3,
    ResourceLimit = 4,
    IoError = 5,
    NullPointer = 6,
    InvalidUtf8 = 7,
    OutOfRange = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcBound {
    Gk = 0,
    Kat = 1,
    ChungErdos = 2,
    Union = 3,
}

impl From<BcBound> for BoundKind {
    fn from(b: BcBound) -> Self {
        match b {
            BcBound::Gk => BoundKind::Gk,
            BcBound::Kat => BoundKind::Kat,
            BcBound::ChungErdos => BoundKind::ChungErdos,
            BcBound::Union => BoundKind::Union,
        }
    }
}

/// An event system parsed from space-file text. Opaque to C.
pub struct BcSystem {
    inner: EventSystem,
}

/// Summary of a gap search: the number of systems with KAT > GK and the
/// largest gap found.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BcSearchSummary {
    pub evaluated: u64,
    pub hits: u64,
    pub gk_above_kat: u64,
    pub ties: u64,
    /// Largest `KAT - GK`, or 0 when there are no hits.
    pub best_gap: c_double,
    /// Trial index of the largest gap, or 0 when there are no hits.
    pub best_trial: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: BcStatus, msg: impl Into<String>) -> BcStatus {
    set_error(msg.into());
    status
}

fn status_of(e: &Error) -> BcStatus {
    match e.code() {
        2 => BcStatus::ParseError,
        3 => BcStatus::DomainError,
        4 => BcStatus::ResourceLimit,
        _ => BcStatus::IoError,
    }
}

/// Runs `f`, turning library errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<BcStatus, (BcStatus, String)>) -> BcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            s
        }
        Ok(Err((s, msg))) => fail(s, msg),
        Err(_) => fail(BcStatus::Panic, "internal panic"),
    }
}

fn lib_err(e: Error) -> (BcStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (BcStatus, String) {
    (BcStatus::NullPointer, format!("`{what}` is null"))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message for the most recent failure on this thread, or NULL after a
/// success. The pointer stays valid until the next call into this library on
/// the same thread.
#[no_mangle]
pub extern "C" fn bc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses space-file text into a new system stored in `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bc_system_parse(text: *const c_char, out: *mut *mut BcSystem) -> BcStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(text).to_str().map_err(|e| (BcStatus::InvalidUtf8, e.to_string()))?;
        let inner = bcbounds::parse_space(text).map_err(|e| lib_err(e.into()))?;
        *out = Box::into_raw(Box::new(BcSystem { inner }));
        Ok(BcStatus::Ok)
    })
}

/// A new handle holding the built-in six-event instance.
#[no_mangle]
pub extern "C" fn bc_system_paper() -> *mut BcSystem {
    Box::into_raw(Box::new(BcSystem { inner: paper_instance() }))
}

/// # Safety
/// `sys` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bc_system_free(sys: *mut BcSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Number of events, or 0 for NULL.
///
/// # Safety
/// `sys` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bc_system_event_count(sys: *const BcSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.inner.len())
}

/// Number of atoms, or 0 for NULL.
///
/// # Safety
/// `sys` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bc_system_atom_count(sys: *const BcSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.inner.space().len())
}

/// Computes one bound. `out_exact` (optional) receives `"num/den"`, to be
/// freed with [`bc_string_free`]; `out_value` (optional) receives the
/// nearest double.
///
/// # Safety
/// `sys` must be a live handle; the out-pointers must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn bc_bound(
    sys: *const BcSystem,
    kind: BcBound,
    out_exact: *mut *mut c_char,
    out_value: *mut c_double,
) -> BcStatus {
    guard(|| {
        let sys = sys.as_ref().ok_or_else(|| null("sys"))?;
        let value = match BoundKind::from(kind) {
            BoundKind::Gk => bcbounds::gk_bound(&sys.inner),
            BoundKind::Kat => bcbounds::kat_bound(&sys.inner).map(|(v, _)| v),
            BoundKind::ChungErdos => bcbounds::chung_erdos(&sys.inner),
            BoundKind::Union => Ok(sys.inner.union_prob()),
        }
        .map_err(lib_err)?;
        if !out_exact.is_null() {
            *out_exact = to_c_string(fmt_exact(&value));
        }
        if !out_value.is_null() {
            *out_value = to_f64(&value);
        }
        Ok(BcStatus::Ok)
    })
}

/// Exact `P(A_i ∩ A_j)` as `"num/den"` (0-based indices).
///
/// # Safety
/// `sys` must be a live handle and `out_exact` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bc_joint_probability(
    sys: *const BcSystem,
    i: usize,
    j: usize,
    out_exact: *mut *mut c_char,
) -> BcStatus {
    guard(|| {
        let sys = sys.as_ref().ok_or_else(|| null("sys"))?;
        if out_exact.is_null() {
            return Err(null("out_exact"));
        }
        let m = sys.inner.len();
        if i >= m || j >= m {
            return Err((BcStatus::OutOfRange, format!("index ({i}, {j}) outside {m} events")));
        }
        let events = sys.inner.events();
        *out_exact = to_c_string(fmt_exact(&events[i].intersection_prob(&events[j])));
        Ok(BcStatus::Ok)
    })
}

/// Re-derives the built-in instance's joint matrix and bounds. Returns
/// [`BcStatus::VerificationFailed`] if any check fails.
///
/// # Safety
/// `out_passed` and `out_total` must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn bc_verify_paper(out_passed: *mut usize, out_total: *mut usize) -> BcStatus {
    guard(|| {
        let checks = verify_instance(&paper_instance()).map_err(lib_err)?;
        let passed = checks.iter().filter(|c| c.passed).count();
        if !out_passed.is_null() {
            *out_passed = passed;
        }
        if !out_total.is_null() {
            *out_total = checks.len();
        }
        if passed == checks.len() {
            Ok(BcStatus::Ok)
        } else {
            let failed: Vec<_> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
            Err((BcStatus::VerificationFailed, format!("failed checks: {}", failed.join(", "))))
        }
    })
}

/// Right-hand side of the dyadic moment bound at prefix length `n` and
/// exponent `p` in (0, 1).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bc_ce1_bound_rhs(n: usize, p: c_double, out: *mut c_double) -> BcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = bcbounds::ce1_bound_rhs(n, p).map_err(lib_err)?;
        Ok(BcStatus::Ok)
    })
}

/// Seeded search for systems with KAT > GK. Deterministic in its arguments.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bc_search(
    atoms: usize,
    events: usize,
    granularity: u64,
    trials: u64,
    seed: u64,
    out: *mut BcSearchSummary,
) -> BcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = SearchConfig { atoms, events, trials, seed, granularity };
        let outcome = search_with_includes(&cfg, &[]).map_err(lib_err)?;
        let best = outcome.hits.first();
        *out = BcSearchSummary {
            evaluated: outcome.stats.evaluated,
            hits: outcome.stats.kat_above_gk,
            gk_above_kat: outcome.stats.gk_above_kat,
            ties: outcome.stats.ties,
            best_gap: best.map_or(0.0, |h| to_f64(&h.gap)),
            best_trial: best.map_or(0, |h| match h.source {
                bcbounds::search::HitSource::Trial(t) => t,
                bcbounds::search::HitSource::Included(_) => 0,
            }),
        };
        Ok(BcStatus::Ok)
    })
}
