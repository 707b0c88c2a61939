//! C ABI over `lempert-lab`.
//!
//! Every fallible call returns an [`LlStatus`] and writes its result through
//! an out-pointer. On failure the message is kept per thread and can be read
//! with [`ll_last_error_message`] until the next failing call on that thread.
//! Handles are opaque, owned by the caller and released with the matching
//! `_free` function. Points in `ℂⁿ` are passed as `2n` doubles, real and
//! imaginary parts interleaved.
//!
//! Pointers must be null or valid for the access the function documents:
//! strings NUL-terminated, handles obtained from this library and not yet
//! freed. Null inputs are reported as `LL_STATUS_NULL_POINTER`.

#![allow(clippy::missing_safety_doc)]

use lempert_lab::conformal::{build_riemann_map, ConformalMap};
use lempert_lab::domain::{build_domain, Domain, DomainSpec};
use lempert_lab::experiments::{run, Experiment, ExperimentReport};
use lempert_lab::metrics::{kobayashi_royden, lempert_ball, lempert_planar};
use lempert_lab::{Error, C64};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidDomain = 3,
    OutsideDomain = 4,
    NoConvergence = 5,
    Io = 6,
    Panic = 7,
}

/// A planar Jordan domain.
pub struct LlDomain(Domain);

/// A normalized Riemann map from a domain onto the unit disc.
pub struct LlMap(ConformalMap);

/// Result of one experiment run.
pub struct LlReport(ExperimentReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(LlStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let status = match e.root() {
            Error::InvalidDomain(_)
            | Error::NonSimpleCurve { .. }
            | Error::VanishingTangent { .. }
            | Error::Unbounded(_) => LlStatus::InvalidDomain,
            Error::NotOnBoundary { .. } | Error::OutsideDomain { .. } | Error::TooCloseToBoundary { .. } => {
                LlStatus::OutsideDomain
            }
            Error::NonConvergence { .. }
            | Error::SingularJacobian(_)
            | Error::Admissibility { .. }
            | Error::ShrinkRequest(_)
            | Error::BandTooWide { .. } => LlStatus::NoConvergence,
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => LlStatus::Io,
            _ => LlStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(LlStatus::InvalidArgument, msg.into())
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LlStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            LlStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(LlStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid("string is not UTF-8"))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure(LlStatus::NullPointer, "null handle".into()))
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(LlStatus::NullPointer, "null output pointer".into()));
    }
    out.write(v);
    Ok(())
}

unsafe fn point(p: *const f64, dim: usize) -> Result<Vec<C64>, Failure> {
    if p.is_null() {
        return Err(Failure(LlStatus::NullPointer, "null point".into()));
    }
    let s = std::slice::from_raw_parts(p, 2 * dim);
    Ok(s.chunks(2).map(|c| C64::new(c[0], c[1])).collect())
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn ll_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ll_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Builds a domain from its JSON description, e.g.
/// `{"kind": "ellipse", "a": 2, "b": 1}`.
#[no_mangle]
pub unsafe extern "C" fn ll_domain_from_json(json: *const c_char, out: *mut *mut LlDomain) -> LlStatus {
    guard(|| {
        let spec = DomainSpec::from_json(text(json)?)?;
        let d = build_domain(&spec)?;
        write(out, Box::into_raw(Box::new(LlDomain(d))))
    })
}

/// Releases a domain; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ll_domain_free(domain: *mut LlDomain) {
    if !domain.is_null() {
        drop(Box::from_raw(domain));
    }
}

/// Signed Euclidean distance to the boundary, positive inside.
#[no_mangle]
pub unsafe extern "C" fn ll_domain_signed_distance(domain: *const LlDomain, re: f64, im: f64, out: *mut f64) -> LlStatus {
    guard(|| write(out, handle(domain)?.0.signed_distance(C64::new(re, im))))
}

/// Riemann map sending `(center_re, center_im)` to 0 with positive
/// derivative there. The map does not borrow the domain.
#[no_mangle]
pub unsafe extern "C" fn ll_map_new(domain: *const LlDomain, center_re: f64, center_im: f64, out: *mut *mut LlMap) -> LlStatus {
    guard(|| {
        let m = build_riemann_map(&handle(domain)?.0, C64::new(center_re, center_im))?;
        write(out, Box::into_raw(Box::new(LlMap(m))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ll_map_free(map: *mut LlMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Image of `z` and the derivative there, each as `(re, im)`; `derivative`
/// may be null.
#[no_mangle]
pub unsafe extern "C" fn ll_map_forward(map: *const LlMap, re: f64, im: f64, value: *mut f64, derivative: *mut f64) -> LlStatus {
    guard(|| {
        let v = handle(map)?.0.forward(C64::new(re, im))?;
        write(value, v.value.re)?;
        write(value.add(1), v.value.im)?;
        if !derivative.is_null() {
            write(derivative, v.derivative.re)?;
            write(derivative.add(1), v.derivative.im)?;
        }
        Ok(())
    })
}

/// Preimage of a point of the open unit disc.
#[no_mangle]
pub unsafe extern "C" fn ll_map_inverse(map: *const LlMap, re: f64, im: f64, out: *mut f64) -> LlStatus {
    guard(|| {
        let z = handle(map)?.0.inverse(C64::new(re, im))?;
        write(out, z.re)?;
        write(out.add(1), z.im)
    })
}

/// Lempert function of the mapped domain.
#[no_mangle]
pub unsafe extern "C" fn ll_lempert_planar(
    map: *const LlMap,
    z_re: f64,
    z_im: f64,
    w_re: f64,
    w_im: f64,
    out: *mut f64,
) -> LlStatus {
    guard(|| write(out, lempert_planar(&handle(map)?.0, C64::new(z_re, z_im), C64::new(w_re, w_im))?))
}

/// Kobayashi–Royden metric at `z` in direction 1.
#[no_mangle]
pub unsafe extern "C" fn ll_kobayashi_royden(map: *const LlMap, re: f64, im: f64, out: *mut f64) -> LlStatus {
    guard(|| write(out, kobayashi_royden(&handle(map)?.0, C64::new(re, im))?))
}

/// Lempert function of the unit ball of `ℂ^dim`; `z` and `w` hold
/// `2 dim` doubles each.
#[no_mangle]
pub unsafe extern "C" fn ll_lempert_ball(dim: usize, z: *const f64, w: *const f64, out: *mut f64) -> LlStatus {
    guard(|| {
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        write(out, lempert_ball(&point(z, dim)?, &point(w, dim)?)?)
    })
}

/// Runs `example4`, `theorem1`, `proposition2` or `estimates` on a JSON
/// configuration.
#[no_mangle]
pub unsafe extern "C" fn ll_experiment_run(name: *const c_char, config_json: *const c_char, out: *mut *mut LlReport) -> LlStatus {
    guard(|| {
        let experiment: Experiment = text(name)?.parse().map_err(|e: Error| invalid(e.to_string()))?;
        let report = run(experiment, text(config_json)?)?;
        write(out, Box::into_raw(Box::new(LlReport(report))))
    })
}

/// 1 when every verdict passed, 0 otherwise.
#[no_mangle]
pub unsafe extern "C" fn ll_report_passed(report: *const LlReport, out: *mut i32) -> LlStatus {
    guard(|| write(out, i32::from(handle(report)?.0.passed())))
}

/// Aggregates, verdicts and failures as JSON; release with
/// [`ll_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ll_report_json(report: *const LlReport, out: *mut *mut c_char) -> LlStatus {
    guard(|| {
        let s = serde_json::to_string(&handle(report)?.0).map_err(|e| Failure::from(Error::from(e)))?;
        write(out, CString::new(s).map_err(|_| invalid("report contains NUL"))?.into_raw())
    })
}

/// Writes `report.csv`, `report.json` and the plots into `dir`.
#[no_mangle]
pub unsafe extern "C" fn ll_report_write(report: *const LlReport, dir: *const c_char) -> LlStatus {
    guard(|| Ok(handle(report)?.0.write(Path::new(text(dir)?))?))
}

#[no_mangle]
pub unsafe extern "C" fn ll_report_free(report: *mut LlReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Releases a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ll_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
