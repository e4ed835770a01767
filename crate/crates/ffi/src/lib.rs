//! C interface to `phaseprobe`.
//!
//! Conventions:
//!
//! * Every fallible call returns a [`PpStatus`]; results go through out
//!   pointers that are written only on success.
//! * States and optimization results are opaque heap handles released with
//!   their `*_free` function. Freeing `NULL` is a no-op.
//! * After a failure, [`pp_last_error_message`] describes it. The string is
//!   owned by the library and valid until the next failing call on the same
//!   thread.
//! * Panics never cross the boundary; they surface as
//!   [`PpStatus::Internal`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use phaseprobe::crb::sld_fisher;
use phaseprobe::fock::{fidelity, mean_photon, FockVector, Parity};
use phaseprobe::herald::{herald_amplitudes, herald_fidelity, HeraldConfig};
use phaseprobe::phase::{covariant_error, minimize_tau, TauResult};
use phaseprobe::squeeze::{psi74_default_dim, psi74_state};
use phaseprobe::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpStatus {
    Ok = 0,
    NullPointer = 1,
    Normalization = 2,
    Contract = 3,
    EmptyRequest = 4,
    Truncation = 5,
    Moment = 6,
    Singularity = 7,
    Precondition = 8,
    Support = 9,
    Range = 10,
    Infeasible = 11,
    Convergence = 12,
    Invalid = 13,
    BufferTooSmall = 14,
    Internal = 99,
}

impl From<&Error> for PpStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Normalization => PpStatus::Normalization,
            Error::Contract(_) => PpStatus::Contract,
            Error::EmptyRequest(_) => PpStatus::EmptyRequest,
            Error::Truncation { .. } => PpStatus::Truncation,
            Error::Moment(_) => PpStatus::Moment,
            Error::Singularity(_) => PpStatus::Singularity,
            Error::Precondition(_) => PpStatus::Precondition,
            Error::Support { .. } => PpStatus::Support,
            Error::Range(_) => PpStatus::Range,
            Error::Infeasible(_) => PpStatus::Infeasible,
            Error::Convergence { .. } => PpStatus::Convergence,
            Error::Invalid(_) => PpStatus::Invalid,
        }
    }
}

/// Opaque photon-number state.
pub struct PpFockVector(FockVector);

/// Opaque result of [`pp_minimize_tau`].
pub struct PpTauResult(TauResult);

/// Scalar part of a [`PpTauResult`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PpTauSummary {
    pub energy_bound: f64,
    pub tau: f64,
    pub e2tau: f64,
    /// Lagrange multiplier; NaN when `has_multiplier` is false.
    pub multiplier: f64,
    pub has_multiplier: bool,
    pub n_trunc: usize,
    /// 0 for the even sector, 1 for the odd one.
    pub sector: u32,
    pub stationarity_residual: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PpFisherReport {
    pub j: f64,
    /// `2/J`; +inf when `mcrb_infinite` is set.
    pub mcrb: f64,
    pub mcrb_infinite: bool,
    pub mean_photon: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard<F: FnOnce() -> Result<(), PpStatus>>(f: F) -> PpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PpStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_last_error("internal panic".into());
            PpStatus::Internal
        }
    }
}

fn fail(e: Error) -> PpStatus {
    let s = PpStatus::from(&e);
    set_last_error(e.to_string());
    s
}

fn null(what: &str) -> PpStatus {
    set_last_error(format!("{what} is NULL"));
    PpStatus::NullPointer
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, PpStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, PpStatus> {
    p.as_mut().ok_or_else(|| null(what))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message describing the last failure on this thread (empty if none).
#[no_mangle]
pub extern "C" fn pp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a state from `len` amplitudes. `im` may be NULL for real input.
/// The state is not normalized.
///
/// # Safety
/// `re` (and `im` when non-NULL) must point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn pp_fock_new(
    re: *const f64,
    im: *const f64,
    len: usize,
    out_state: *mut *mut PpFockVector,
) -> PpStatus {
    guard(|| {
        let slot = out(out_state, "out_state")?;
        if re.is_null() {
            return Err(null("re"));
        }
        let re = std::slice::from_raw_parts(re, len);
        let im = if im.is_null() { None } else { Some(std::slice::from_raw_parts(im, len)) };
        let amps = (0..len).map(|i| Complex64::new(re[i], im.map_or(0.0, |v| v[i]))).collect();
        let v = FockVector::new(amps).map_err(fail)?;
        *slot = boxed(PpFockVector(v));
        Ok(())
    })
}

/// Unit-norm copy of `state`.
///
/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pp_fock_normalize(state: *const PpFockVector, out_state: *mut *mut PpFockVector) -> PpStatus {
    guard(|| {
        let v = handle(state, "state")?;
        let slot = out(out_state, "out_state")?;
        *slot = boxed(PpFockVector(v.0.normalize().map_err(fail)?));
        Ok(())
    })
}

/// # Safety
/// `state` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn pp_fock_free(state: *mut PpFockVector) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Truncation dimension of `state`.
///
/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pp_fock_len(state: *const PpFockVector, out_len: *mut usize) -> PpStatus {
    guard(|| {
        *out(out_len, "out_len")? = handle(state, "state")?.0.n_trunc();
        Ok(())
    })
}

/// Copies the amplitudes into `re`/`im` (each `capacity` long; `im` may be
/// NULL). Fails with `BUFFER_TOO_SMALL` when `capacity < len`.
///
/// # Safety
/// `state` must be a live handle; buffers must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn pp_fock_amplitudes(
    state: *const PpFockVector,
    re: *mut f64,
    im: *mut f64,
    capacity: usize,
) -> PpStatus {
    guard(|| {
        let v = &handle(state, "state")?.0;
        if re.is_null() {
            return Err(null("re"));
        }
        if capacity < v.n_trunc() {
            set_last_error(format!("buffer holds {capacity} values, state has {}", v.n_trunc()));
            return Err(PpStatus::BufferTooSmall);
        }
        for (i, a) in v.amplitudes().iter().enumerate() {
            *re.add(i) = a.re;
            if !im.is_null() {
                *im.add(i) = a.im;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pp_mean_photon(state: *const PpFockVector, out_value: *mut f64) -> PpStatus {
    guard(|| {
        let v = handle(state, "state")?;
        *out(out_value, "out_value")? = mean_photon(&v.0).map_err(fail)?;
        Ok(())
    })
}

/// Average error `2 sin²` of the covariant measurement.
///
/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pp_covariant_error(state: *const PpFockVector, out_value: *mut f64) -> PpStatus {
    guard(|| {
        let v = handle(state, "state")?;
        *out(out_value, "out_value")? = covariant_error(&v.0).map_err(fail)?;
        Ok(())
    })
}

/// `|⟨a|b⟩|²`.
///
/// # Safety
/// `a` and `b` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn pp_fidelity(a: *const PpFockVector, b: *const PpFockVector, out_value: *mut f64) -> PpStatus {
    guard(|| {
        let (a, b) = (handle(a, "a")?, handle(b, "b")?);
        *out(out_value, "out_value")? = fidelity(&a.0, &b.0);
        Ok(())
    })
}

/// Minimal covariant error under `⟨n̂⟩ ≤ energy_bound` in `n_trunc` levels.
///
/// # Safety
/// `out_result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_minimize_tau(
    energy_bound: f64,
    n_trunc: usize,
    out_result: *mut *mut PpTauResult,
) -> PpStatus {
    guard(|| {
        let slot = out(out_result, "out_result")?;
        *slot = boxed(PpTauResult(minimize_tau(energy_bound, n_trunc).map_err(fail)?));
        Ok(())
    })
}

/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pp_tau_summary(result: *const PpTauResult, out_summary: *mut PpTauSummary) -> PpStatus {
    guard(|| {
        let r = &handle(result, "result")?.0;
        *out(out_summary, "out_summary")? = PpTauSummary {
            energy_bound: r.energy_bound,
            tau: r.tau,
            e2tau: r.e2tau(),
            multiplier: r.multiplier.unwrap_or(f64::NAN),
            has_multiplier: r.multiplier.is_some(),
            n_trunc: r.n_trunc,
            sector: match r.sector {
                Parity::Even => 0,
                Parity::Odd => 1,
            },
            stationarity_residual: r.stationarity_residual,
        };
        Ok(())
    })
}

/// Copy of the optimal state as a new handle.
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pp_tau_optimizer(result: *const PpTauResult, out_state: *mut *mut PpFockVector) -> PpStatus {
    guard(|| {
        let r = &handle(result, "result")?.0;
        *out(out_state, "out_state")? = boxed(PpFockVector(r.optimizer.clone()));
        Ok(())
    })
}

/// # Safety
/// `result` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn pp_tau_free(result: *mut PpTauResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Squeezed three-level probe at squeezing `r`; `dim = 0` picks the
/// default truncation.
///
/// # Safety
/// `out_state` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_psi74_state(r: f64, dim: usize, out_state: *mut *mut PpFockVector) -> PpStatus {
    guard(|| {
        let slot = out(out_state, "out_state")?;
        let dim = if dim == 0 { psi74_default_dim(r) } else { dim };
        *slot = boxed(PpFockVector(psi74_state(r, dim).map_err(fail)?));
        Ok(())
    })
}

/// Heralded amplitudes for squeezing `q` and four displacements.
/// Writes the five unnormalized amplitudes to `phi_out`, the normalizer to
/// `normalizer_out` and, if `out_state` is non-NULL, the normalized state.
///
/// # Safety
/// `betas` must hold 4 doubles and `phi_out` room for 5.
#[no_mangle]
pub unsafe extern "C" fn pp_herald(
    q: f64,
    betas: *const f64,
    phi_out: *mut f64,
    normalizer_out: *mut f64,
    out_state: *mut *mut PpFockVector,
) -> PpStatus {
    guard(|| {
        if betas.is_null() {
            return Err(null("betas"));
        }
        if phi_out.is_null() {
            return Err(null("phi_out"));
        }
        let norm = out(normalizer_out, "normalizer_out")?;
        let b = std::slice::from_raw_parts(betas, 4);
        let cfg = HeraldConfig::new(q, [b[0], b[1], b[2], b[3]]).map_err(fail)?;
        let h = herald_amplitudes(&cfg).map_err(fail)?;
        ptr::copy_nonoverlapping(h.phi.as_ptr(), phi_out, 5);
        *norm = h.normalizer;
        if let Some(slot) = out_state.as_mut() {
            *slot = boxed(PpFockVector(h.state));
        }
        Ok(())
    })
}

/// Fidelity of the heralded state with a normalized `target`.
///
/// # Safety
/// `betas` must hold 4 doubles; `target` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pp_herald_fidelity(
    q: f64,
    betas: *const f64,
    target: *const PpFockVector,
    out_value: *mut f64,
) -> PpStatus {
    guard(|| {
        if betas.is_null() {
            return Err(null("betas"));
        }
        let t = handle(target, "target")?;
        let slot = out(out_value, "out_value")?;
        let b = std::slice::from_raw_parts(betas, 4);
        let cfg = HeraldConfig::new(q, [b[0], b[1], b[2], b[3]]).map_err(fail)?;
        *slot = herald_fidelity(&cfg, &t.0).map_err(fail)?;
        Ok(())
    })
}

/// SLD Fisher information `4 Var(n̂)` and the bound `2/J`.
///
/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pp_sld_fisher(state: *const PpFockVector, out_report: *mut PpFisherReport) -> PpStatus {
    guard(|| {
        let v = handle(state, "state")?;
        let slot = out(out_report, "out_report")?;
        let r = sld_fisher(&v.0).map_err(fail)?;
        *slot = PpFisherReport {
            j: r.j,
            mcrb: r.mcrb.unwrap_or(f64::INFINITY),
            mcrb_infinite: r.mcrb.is_none(),
            mean_photon: r.mean_photon,
        };
        Ok(())
    })
}
