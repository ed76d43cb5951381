//! C ABI over the `mlce` solvers.
//!
//! Instances and solutions cross the boundary as opaque handles that the
//! caller frees with the matching `*_free` function. Every fallible call
//! returns an [`MlceStatus`]; on failure [`mlce_last_error`] describes the
//! problem. Strings returned through `char **` out-parameters are owned by
//! the caller and released with [`mlce_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::{Duration, Instant};

use mlce::cli::{run_algo, Algo};
use mlce::io::{parse_instance, parse_solution, serialize_instance, serialize_solution};
use mlce::kernelize::{kernelize, KernelResult};
use mlce::{verify, Error, Instance, Mode, Solution};

#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum MlceStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InputError = 4,
    Unsupported = 5,
    Timeout = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum MlceAlgo {
    Auto = 0,
    Branch = 1,
    Xp = 2,
    Oracle = 3,
    Structured = 4,
}

#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum MlceMode {
    Mlce = 0,
    Tce = 1,
}

/// Opaque instance handle.
pub struct MlceInstance {
    inner: Instance,
}

/// Opaque solver answer: either a solution or a negative answer, tied to the
/// instance it was computed for.
pub struct MlceSolution {
    instance: Instance,
    answer: Option<Solution>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("nul bytes removed"));
}

fn status_of(e: &Error) -> MlceStatus {
    match e {
        Error::Parse { .. } => MlceStatus::ParseError,
        Error::Capability(_) | Error::ModeMismatch { .. } => MlceStatus::Unsupported,
        Error::Timeout => MlceStatus::Timeout,
        Error::Precondition(_) => MlceStatus::Internal,
        _ => MlceStatus::InputError,
    }
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), (MlceStatus, String)>) -> MlceStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            MlceStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MlceStatus::Internal
        }
    }
}

fn lift(e: Error) -> (MlceStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (MlceStatus, String) {
    (MlceStatus::NullArgument, format!("{what} is null"))
}

unsafe fn text_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (MlceStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    // SAFETY: the caller passes a nul-terminated string that outlives the call.
    unsafe { CStr::from_ptr(p) }.to_str().map_err(|_| {
        (
            MlceStatus::InvalidUtf8,
            format!("{what} is not valid UTF-8"),
        )
    })
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, (MlceStatus, String)> {
    // SAFETY: non-null handles were produced by this library and not yet freed.
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

fn give_string(out: *mut *mut c_char, s: String) -> Result<(), (MlceStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c =
        CString::new(s).map_err(|_| (MlceStatus::Internal, "output contains a nul byte".into()))?;
    // SAFETY: `out` is non-null and points to writable storage for a pointer.
    unsafe { *out = c.into_raw() };
    Ok(())
}

fn give<T>(out: *mut *mut T, value: T) -> Result<(), (MlceStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    // SAFETY: as above.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn mlce_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mlce_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: produced by `CString::into_raw` in `give_string`.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Parses an instance from its text form.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mlce_instance_parse(
    text: *const c_char,
    out: *mut *mut MlceInstance,
) -> MlceStatus {
    guard(|| {
        let text = unsafe { text_arg(text, "text") }?;
        let inner = parse_instance(text).map_err(lift)?;
        give(out, MlceInstance { inner })
    })
}

/// # Safety
/// `inst` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mlce_instance_free(inst: *mut MlceInstance) {
    if !inst.is_null() {
        // SAFETY: produced by `Box::into_raw` in `give`.
        drop(unsafe { Box::from_raw(inst) });
    }
}

/// Canonical text form of an instance.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mlce_instance_serialize(
    inst: *const MlceInstance,
    out: *mut *mut c_char,
) -> MlceStatus {
    guard(|| {
        let inst = unsafe { ref_arg(inst, "instance") }?;
        give_string(out, serialize_instance(&inst.inner))
    })
}

/// Writes the vertex count, layer count and budgets. Any output pointer may be null.
///
/// # Safety
/// `inst` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn mlce_instance_shape(
    inst: *const MlceInstance,
    mode: *mut MlceMode,
    n: *mut usize,
    ell: *mut usize,
    k: *mut usize,
    d: *mut usize,
) -> MlceStatus {
    guard(|| {
        let inst = &unsafe { ref_arg(inst, "instance") }?.inner;
        let m = match inst.mode() {
            Mode::Mlce => MlceMode::Mlce,
            Mode::Tce => MlceMode::Tce,
        };
        // SAFETY: each pointer is checked for null and otherwise writable.
        unsafe {
            if let Some(p) = mode.as_mut() {
                *p = m;
            }
            for (p, v) in [
                (n, inst.n()),
                (ell, inst.ell()),
                (k, inst.k()),
                (d, inst.d()),
            ] {
                if let Some(p) = p.as_mut() {
                    *p = v;
                }
            }
        }
        Ok(())
    })
}

/// Solves an instance. A `timeout_seconds` of zero or less means no limit;
/// limits apply to the branch and xp algorithms.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mlce_solve(
    inst: *const MlceInstance,
    algo: MlceAlgo,
    timeout_seconds: f64,
    out: *mut *mut MlceSolution,
) -> MlceStatus {
    guard(|| {
        let inst = &unsafe { ref_arg(inst, "instance") }?.inner;
        let algo = match algo {
            MlceAlgo::Auto => Algo::Auto,
            MlceAlgo::Branch => Algo::Branch,
            MlceAlgo::Xp => Algo::Xp,
            MlceAlgo::Oracle => Algo::Oracle,
            MlceAlgo::Structured => Algo::Structured,
        };
        let deadline = (timeout_seconds > 0.0)
            .then(|| Duration::try_from_secs_f64(timeout_seconds).ok())
            .flatten()
            .map(|t| Instant::now() + t);
        let (answer, _) = run_algo(inst, algo, None, deadline).map_err(lift)?;
        give(
            out,
            MlceSolution {
                instance: inst.clone(),
                answer,
            },
        )
    })
}

/// Parses a solution file for `inst`.
///
/// # Safety
/// `inst` must be a live handle, `text` nul-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mlce_solution_parse(
    inst: *const MlceInstance,
    text: *const c_char,
    out: *mut *mut MlceSolution,
) -> MlceStatus {
    guard(|| {
        let inst = &unsafe { ref_arg(inst, "instance") }?.inner;
        let text = unsafe { text_arg(text, "text") }?;
        let answer = parse_solution(text, inst).map_err(lift)?;
        give(
            out,
            MlceSolution {
                instance: inst.clone(),
                answer,
            },
        )
    })
}

/// # Safety
/// `sol` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mlce_solution_free(sol: *mut MlceSolution) {
    if !sol.is_null() {
        // SAFETY: produced by `Box::into_raw` in `give`.
        drop(unsafe { Box::from_raw(sol) });
    }
}

/// 1 for a yes answer, 0 for no, -1 for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mlce_solution_is_yes(sol: *const MlceSolution) -> i32 {
    // SAFETY: see above.
    match unsafe { sol.as_ref() } {
        Some(s) => i32::from(s.answer.is_some()),
        None => -1,
    }
}

/// Solution file text.
///
/// # Safety
/// `sol` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mlce_solution_serialize(
    sol: *const MlceSolution,
    out: *mut *mut c_char,
) -> MlceStatus {
    guard(|| {
        let sol = unsafe { ref_arg(sol, "solution") }?;
        give_string(out, serialize_solution(&sol.instance, sol.answer.as_ref()))
    })
}

/// Checks `sol` against `inst`; `*valid` becomes 1 or 0. A negative answer
/// carries no certificate and is reported as an input error. On an invalid
/// solution, [`mlce_last_error`] holds the violation report.
///
/// # Safety
/// Both handles must be live; `valid` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mlce_verify(
    inst: *const MlceInstance,
    sol: *const MlceSolution,
    valid: *mut i32,
) -> MlceStatus {
    let mut report_text = String::new();
    let status = guard(|| {
        let inst = &unsafe { ref_arg(inst, "instance") }?.inner;
        let sol = unsafe { ref_arg(sol, "solution") }?;
        let Some(s) = &sol.answer else {
            return Err((
                MlceStatus::InputError,
                "answer no has no certificate".into(),
            ));
        };
        let report = verify(inst, s).map_err(lift)?;
        if valid.is_null() {
            return Err(null("valid"));
        }
        // SAFETY: checked non-null.
        unsafe { *valid = i32::from(report.is_valid()) };
        if !report.is_valid() {
            report_text = report.to_string();
        }
        Ok(())
    });
    if status == MlceStatus::Ok && !report_text.is_empty() {
        set_error(report_text);
    }
    status
}

/// Kernelizes `inst`. On a trivial rejection `*out` is set to null and
/// `*rejected` to 1; otherwise `*out` receives the kernel and `*rejected` 0.
///
/// # Safety
/// `inst` must be a live handle; `out` and `rejected` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mlce_kernelize(
    inst: *const MlceInstance,
    out: *mut *mut MlceInstance,
    rejected: *mut i32,
) -> MlceStatus {
    guard(|| {
        let inst = &unsafe { ref_arg(inst, "instance") }?.inner;
        if out.is_null() || rejected.is_null() {
            return Err(null("output"));
        }
        match kernelize(inst) {
            KernelResult::TrivialNo(_) => {
                // SAFETY: both outputs checked non-null.
                unsafe {
                    *out = ptr::null_mut();
                    *rejected = 1;
                }
                Ok(())
            }
            KernelResult::Reduced { instance, .. } => {
                // SAFETY: checked non-null.
                unsafe { *rejected = 0 };
                give(out, MlceInstance { inner: instance })
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&Error::Timeout), MlceStatus::Timeout);
        assert_eq!(
            status_of(&Error::Capability("x".into())),
            MlceStatus::Unsupported
        );
        assert_eq!(
            status_of(&Error::Parse {
                line: 1,
                message: "m".into()
            }),
            MlceStatus::ParseError
        );
    }

    #[test]
    fn last_error_is_cleared_on_success() {
        set_error("boom");
        assert_eq!(guard(|| Ok(())), MlceStatus::Ok);
        let msg = unsafe { CStr::from_ptr(mlce_last_error()) };
        assert!(msg.to_bytes().is_empty());
    }

    #[test]
    fn panics_become_internal_errors() {
        assert_eq!(guard(|| panic!("nope")), MlceStatus::Internal);
    }
}
