//! C interface to `genus2`.
//!
//! Every function returns a [`G2Status`]; results go through out-pointers.
//! Surfaces and lattices are opaque handles released with their `_free`
//! function. After a failure [`g2_last_error`] describes it (per thread).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use genus2::lattice::{z2_lattice_eps, z2_lattice_rho, EvenLattice, ThetaPolicy};
use genus2::sewing_eps::{z2_boson_eps, z2_boson_eps_modular, EpsPoint, EpsSewing, PeriodMatrix, SewPolicy};
use genus2::sewing_rho::{z2_boson_rho, z2_boson_rho_modular, RhoPoint, RhoSewing};
use genus2::verify::{run_suite, SuiteParams};
use genus2::{Error, C64};

/// Status codes.
#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum G2Status {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    DomainError = 3,
    NonConvergence = 4,
    BranchError = 5,
    ValuationError = 6,
    IndexError = 7,
    CapExceeded = 8,
    FitError = 9,
    /// a verify suite ran but some check failed
    CheckFailed = 10,
    Panic = 99,
}

#[repr(C)]
#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct G2Complex {
    pub re: f64,
    pub im: f64,
}

/// Symmetric 2x2 period matrix.
#[repr(C)]
#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct G2PeriodMatrix {
    pub o11: G2Complex,
    pub o12: G2Complex,
    pub o22: G2Complex,
}

/// Truncation settings; see [`g2_policy_default`].
#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct G2Policy {
    /// relative stability demanded between successive truncations
    pub tol: f64,
    /// first truncation size
    pub n_start: usize,
    /// largest truncation size
    pub cap: usize,
}

/// A two-tori (eps) sewing point with its evaluator.
pub struct G2EpsSurface {
    sewing: EpsSewing,
    policy: SewPolicy,
}

/// A self-sewn torus (rho) point with its evaluator.
pub struct G2RhoSurface {
    sewing: RhoSewing,
    policy: SewPolicy,
}

/// Positive definite even lattice.
pub struct G2Lattice {
    lat: EvenLattice,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> G2Status {
    match e {
        Error::NonConvergence { .. } => G2Status::NonConvergence,
        Error::DomainError(_) => G2Status::DomainError,
        Error::BranchError(_) => G2Status::BranchError,
        Error::ValuationError(_) => G2Status::ValuationError,
        Error::IndexError(_) => G2Status::IndexError,
        Error::CapExceeded(_) => G2Status::CapExceeded,
        Error::FitError(_) => G2Status::FitError,
        Error::InvalidInput(_) => G2Status::InvalidInput,
    }
}

enum Fail {
    Null,
    Lib(Error),
    Status(G2Status, String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> G2Status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            G2Status::Ok
        }
        Ok(Err(Fail::Null)) => {
            set_error("null pointer argument");
            G2Status::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            G2Status::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null)
}

unsafe fn get<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null)
}

unsafe fn cstr<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null);
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Status(G2Status::InvalidInput, "string is not UTF-8".into()))
}

fn cx(z: G2Complex) -> C64 {
    C64::new(z.re, z.im)
}

fn gc(z: C64) -> G2Complex {
    G2Complex { re: z.re, im: z.im }
}

fn gpm(om: &PeriodMatrix) -> G2PeriodMatrix {
    G2PeriodMatrix {
        o11: gc(om.o11),
        o12: gc(om.o12),
        o22: gc(om.o22),
    }
}

fn sew_policy(p: &G2Policy) -> Result<SewPolicy, Fail> {
    if !(p.tol > 0.0) || p.cap == 0 || p.n_start == 0 || p.n_start > p.cap {
        return Err(Fail::Status(
            G2Status::InvalidInput,
            format!("policy needs tol > 0 and 0 < n_start <= cap, got {p:?}"),
        ));
    }
    Ok(SewPolicy {
        tol: p.tol,
        n_start: p.n_start,
        cap: p.cap,
        ..SewPolicy::default()
    })
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn g2_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// The library's default truncation settings.
#[no_mangle]
pub extern "C" fn g2_policy_default() -> G2Policy {
    let p = SewPolicy::default();
    G2Policy {
        tol: p.tol,
        n_start: p.n_start,
        cap: p.cap,
    }
}

/// Creates an eps surface; `policy` may be null for the defaults.
///
/// # Safety
/// `policy` is null or valid; `out_surface` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn g2_eps_new(
    tau1: G2Complex,
    tau2: G2Complex,
    eps: G2Complex,
    policy: *const G2Policy,
    out_surface: *mut *mut G2EpsSurface,
) -> G2Status {
    guard(|| {
        let o = out(out_surface)?;
        *o = ptr::null_mut();
        let policy = match policy.as_ref() {
            Some(p) => sew_policy(p)?,
            None => SewPolicy::default(),
        };
        let pt = EpsPoint::new(cx(tau1), cx(tau2), cx(eps))?;
        let sewing = EpsSewing::new(pt, &policy)?;
        *o = Box::into_raw(Box::new(G2EpsSurface { sewing, policy }));
        Ok(())
    })
}

/// # Safety
/// `s` is null or came from [`g2_eps_new`] and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn g2_eps_free(s: *mut G2EpsSurface) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Period matrix, `det(I - A1 A2)` and the truncation size used.
///
/// # Safety
/// `s` is a live handle; out-pointers are valid or null (null ones are skipped).
#[no_mangle]
pub unsafe extern "C" fn g2_eps_period_matrix(
    s: *mut G2EpsSurface,
    out_omega: *mut G2PeriodMatrix,
    out_det: *mut G2Complex,
    out_truncation: *mut usize,
) -> G2Status {
    guard(|| {
        let s = get(s)?;
        let e = s.sewing.evaluate()?;
        if let Some(o) = out_omega.as_mut() {
            *o = gpm(&e.omega);
        }
        if let Some(d) = out_det.as_mut() {
            *d = gc(e.det);
        }
        if let Some(n) = out_truncation.as_mut() {
            *n = e.n;
        }
        Ok(())
    })
}

/// Partition function of the rank `c` boson.
///
/// # Safety
/// `s` is a live handle and `out_z` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn g2_eps_partition_boson(s: *mut G2EpsSurface, c: f64, out_z: *mut G2Complex) -> G2Status {
    guard(|| {
        let s = get(s)?;
        let o = out(out_z)?;
        *o = gc(z2_boson_eps(&s.sewing.pt, c, &s.policy)?);
        Ok(())
    })
}

/// `1 / (eta(tau1)^2 eta(tau2)^2 det(I - A1 A2))`.
///
/// # Safety
/// `s` is a live handle and `out_z` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn g2_eps_partition_modular(s: *mut G2EpsSurface, out_z: *mut G2Complex) -> G2Status {
    guard(|| {
        let s = get(s)?;
        let o = out(out_z)?;
        *o = gc(z2_boson_eps_modular(&s.sewing.pt, &s.policy)?);
        Ok(())
    })
}

/// Lattice theory partition function.
///
/// # Safety
/// `s` and `lat` are live handles and `out_z` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn g2_eps_partition_lattice(
    s: *mut G2EpsSurface,
    lat: *const G2Lattice,
    out_z: *mut G2Complex,
) -> G2Status {
    guard(|| {
        let s = get(s)?;
        let lat = lat.as_ref().ok_or(Fail::Null)?;
        let o = out(out_z)?;
        *o = gc(z2_lattice_eps(&lat.lat, &s.sewing.pt, &s.policy, &ThetaPolicy::default())?.0);
        Ok(())
    })
}

/// Creates a rho surface; `policy` may be null for the defaults.
///
/// # Safety
/// `policy` is null or valid; `out_surface` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn g2_rho_new(
    tau: G2Complex,
    w: G2Complex,
    rho: G2Complex,
    policy: *const G2Policy,
    out_surface: *mut *mut G2RhoSurface,
) -> G2Status {
    guard(|| {
        let o = out(out_surface)?;
        *o = ptr::null_mut();
        let policy = match policy.as_ref() {
            Some(p) => sew_policy(p)?,
            None => SewPolicy::default(),
        };
        let pt = RhoPoint::new(cx(tau), cx(w), cx(rho))?;
        let sewing = RhoSewing::new(pt, &policy)?;
        *o = Box::into_raw(Box::new(G2RhoSurface { sewing, policy }));
        Ok(())
    })
}

/// # Safety
/// `s` is null or came from [`g2_rho_new`] and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn g2_rho_free(s: *mut G2RhoSurface) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Period matrix, `det(I - R)` and the truncation size used.
///
/// # Safety
/// `s` is a live handle; out-pointers are valid or null (null ones are skipped).
#[no_mangle]
pub unsafe extern "C" fn g2_rho_period_matrix(
    s: *mut G2RhoSurface,
    out_omega: *mut G2PeriodMatrix,
    out_det: *mut G2Complex,
    out_truncation: *mut usize,
) -> G2Status {
    guard(|| {
        let s = get(s)?;
        let e = s.sewing.evaluate()?;
        if let Some(o) = out_omega.as_mut() {
            *o = gpm(&e.omega);
        }
        if let Some(d) = out_det.as_mut() {
            *d = gc(e.det);
        }
        if let Some(n) = out_truncation.as_mut() {
            *n = e.n;
        }
        Ok(())
    })
}

/// Partition function of the rank `c` boson.
///
/// # Safety
/// `s` is a live handle and `out_z` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn g2_rho_partition_boson(s: *mut G2RhoSurface, c: f64, out_z: *mut G2Complex) -> G2Status {
    guard(|| {
        let s = get(s)?;
        let o = out(out_z)?;
        *o = gc(z2_boson_rho(&s.sewing.pt, c, &s.policy)?);
        Ok(())
    })
}

/// `1 / (eta(tau)^2 det(I - R))`.
///
/// # Safety
/// `s` is a live handle and `out_z` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn g2_rho_partition_modular(s: *mut G2RhoSurface, out_z: *mut G2Complex) -> G2Status {
    guard(|| {
        let s = get(s)?;
        let o = out(out_z)?;
        *o = gc(z2_boson_rho_modular(&s.sewing.pt, &s.policy)?);
        Ok(())
    })
}

/// Lattice theory partition function.
///
/// # Safety
/// `s` and `lat` are live handles and `out_z` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn g2_rho_partition_lattice(
    s: *mut G2RhoSurface,
    lat: *const G2Lattice,
    out_z: *mut G2Complex,
) -> G2Status {
    guard(|| {
        let s = get(s)?;
        let lat = lat.as_ref().ok_or(Fail::Null)?;
        let o = out(out_z)?;
        *o = gc(z2_lattice_rho(&lat.lat, &s.sewing.pt, &s.policy, &ThetaPolicy::default())?.0);
        Ok(())
    })
}

/// Reads a lattice from JSON `{"rank": l, "gram": [[...]]}`.
///
/// # Safety
/// `json` is a NUL-terminated string; `out_lattice` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn g2_lattice_from_json(json: *const c_char, out_lattice: *mut *mut G2Lattice) -> G2Status {
    guard(|| {
        let o = out(out_lattice)?;
        *o = ptr::null_mut();
        let lat = EvenLattice::from_json(cstr(json)?)?;
        *o = Box::into_raw(Box::new(G2Lattice { lat }));
        Ok(())
    })
}

/// # Safety
/// `lat` is null or came from [`g2_lattice_from_json`] and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn g2_lattice_free(lat: *mut G2Lattice) {
    if !lat.is_null() {
        drop(Box::from_raw(lat));
    }
}

/// Runs a check suite (`modular`, `graphs`, `oracle`, `comparison`, `catalan`,
/// `holomorphy`) and hands back its JSON report, to be released with
/// [`g2_string_free`]. Returns `CheckFailed` when the report does not pass.
///
/// # Safety
/// `suite` is a NUL-terminated string; `out_json` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn g2_verify(suite: *const c_char, out_json: *mut *mut c_char) -> G2Status {
    let mut passed = true;
    let st = guard(|| {
        let o = out(out_json)?;
        *o = ptr::null_mut();
        let report = run_suite(cstr(suite)?, &SuiteParams::default())?;
        passed = report.pass;
        *o = CString::new(report.to_json()).expect("JSON has no NUL").into_raw();
        Ok(())
    });
    if st == G2Status::Ok && !passed {
        set_error("some checks failed");
        return G2Status::CheckFailed;
    }
    st
}

/// # Safety
/// `s` is null or a string returned by this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn g2_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
