//! C ABI over `kickchain`.
//!
//! Every fallible function returns a [`KcStatus`]; on failure the message is
//! available from [`kc_last_error_message`] on the same thread. Objects are
//! opaque handles released by their `*_free` function. Amplitude buffers are
//! interleaved `(re, im)` doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kickchain::ddcalc;
use kickchain::floquet::FloquetOperator;
use kickchain::spectral::{self, FloquetSpectrum, SpectralDiagnostics};
use kickchain::{ChainConfig, Error, StatePreset, StateVector};
use num_complex::Complex64 as C64;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KcStatus {
    KcOk = 0,
    KcErrIo = 1,
    KcErrConfig = 2,
    KcErrNumeric = 3,
    KcErrNullPointer = 4,
    KcErrInvalidArgument = 5,
    KcErrInternal = 6,
}

/// Propagator selection for [`kc_floquet_new`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KcPath {
    /// Dense up to the dense size limit, matrix-free beyond.
    KcPathAuto = 0,
    KcPathDense = 1,
    KcPathMatrixFree = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KcChainConfig {
    pub l: usize,
    pub j: f64,
    pub omega: f64,
    pub k: f64,
    pub t: f64,
    pub j0_offset: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KcDiagnostics {
    pub ipr: f64,
    pub staggered_mag: f64,
    /// Mean entropy of sites `1..=entropy_block` over eigenstates.
    pub entropy: f64,
    pub entropy_block: usize,
    pub gap_ratio: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KcThermalFit {
    pub beta_eff: f64,
    pub epsilon_p: f64,
    pub residual: f64,
    /// Nonzero when the target energy sits at a spectral edge.
    pub saturated: i32,
}

pub struct KcFloquet(FloquetOperator);
pub struct KcState(StateVector);
pub struct KcSpectrum(FloquetSpectrum);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> KcStatus {
    match e.exit_code() {
        2 => KcStatus::KcErrConfig,
        3 => KcStatus::KcErrNumeric,
        _ => KcStatus::KcErrIo,
    }
}

fn fail(status: KcStatus, msg: &str) -> KcStatus {
    set_error(msg);
    status
}

/// Runs `f`, translating errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), KcStatus>>(f: F) -> KcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            KcStatus::KcOk
        }
        Ok(Err(s)) => s,
        Err(_) => fail(KcStatus::KcErrInternal, "internal panic"),
    }
}

fn lift<T>(r: kickchain::Result<T>) -> Result<T, KcStatus> {
    r.map_err(|e| fail(status_of(&e), &e.to_string()))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, KcStatus> {
    p.as_ref().ok_or_else(|| fail(KcStatus::KcErrNullPointer, &format!("{what} is null")))
}

unsafe fn deref_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, KcStatus> {
    p.as_mut().ok_or_else(|| fail(KcStatus::KcErrNullPointer, &format!("{what} is null")))
}

fn to_config(c: &KcChainConfig) -> Result<ChainConfig, KcStatus> {
    let cfg = ChainConfig { l: c.l, j: c.j, omega: c.omega, k: c.k, t: c.t, j0_offset: c.j0_offset };
    lift(cfg.validate())?;
    Ok(cfg)
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn kc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn kc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// `Omega = 1`, `T = 1/16`, `J = K = j0_offset = 0`.
#[no_mangle]
pub unsafe extern "C" fn kc_config_default(l: usize, out: *mut KcChainConfig) -> KcStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        let c = ChainConfig::new(l, 0.0, 0.0);
        *out = KcChainConfig { l: c.l, j: c.j, omega: c.omega, k: c.k, t: c.t, j0_offset: c.j0_offset };
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn kc_floquet_new(config: *const KcChainConfig, path: KcPath, out: *mut *mut KcFloquet) -> KcStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        *out = ptr::null_mut();
        let cfg = to_config(deref(config, "config")?)?;
        let op = lift(match path {
            KcPath::KcPathAuto => kickchain::floquet::build_floquet(&cfg),
            KcPath::KcPathDense => FloquetOperator::dense(&cfg),
            KcPath::KcPathMatrixFree => FloquetOperator::matrix_free(&cfg),
        })?;
        *out = Box::into_raw(Box::new(KcFloquet(op)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn kc_floquet_free(u: *mut KcFloquet) {
    if !u.is_null() {
        drop(Box::from_raw(u));
    }
}

/// Replaces `*state` by `U_F^n_kicks state`.
#[no_mangle]
pub unsafe extern "C" fn kc_floquet_apply(u: *const KcFloquet, state: *mut KcState, n_kicks: usize) -> KcStatus {
    guard(|| {
        let u = deref(u, "operator")?;
        let state = deref_mut(state, "state")?;
        state.0 = lift(u.0.apply_n(&state.0, n_kicks))?;
        Ok(())
    })
}

/// Preset names: `neel`, `vacuum`, `domain_wall`, `single:<j>`, `bell_pair:<i>,<j>`,
/// `global_bell`, `pattern:<udud...>`.
#[no_mangle]
pub unsafe extern "C" fn kc_state_from_preset(l: usize, preset: *const c_char, out: *mut *mut KcState) -> KcStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        *out = ptr::null_mut();
        if preset.is_null() {
            return Err(fail(KcStatus::KcErrNullPointer, "preset is null"));
        }
        let name = CStr::from_ptr(preset)
            .to_str()
            .map_err(|_| fail(KcStatus::KcErrInvalidArgument, "preset is not UTF-8"))?;
        let preset: StatePreset = lift(name.parse())?;
        *out = Box::into_raw(Box::new(KcState(lift(preset.build(l))?)));
        Ok(())
    })
}

/// `len` doubles of interleaved amplitudes, `len = 2 * 2^l`; must be normalized.
#[no_mangle]
pub unsafe extern "C" fn kc_state_from_amplitudes(l: usize, amps: *const f64, len: usize, out: *mut *mut KcState) -> KcStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        *out = ptr::null_mut();
        if amps.is_null() {
            return Err(fail(KcStatus::KcErrNullPointer, "amplitudes are null"));
        }
        if l == 0 || l >= usize::BITS as usize || len != 2usize << l {
            return Err(fail(KcStatus::KcErrInvalidArgument, "buffer length must be 2 * 2^L"));
        }
        let raw = std::slice::from_raw_parts(amps, len);
        let v: Vec<C64> = raw.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect();
        *out = Box::into_raw(Box::new(KcState(lift(StateVector::from_amplitudes(l, v))?)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn kc_state_free(s: *mut KcState) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Hilbert-space dimension `2^L`, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn kc_state_dim(s: *const KcState) -> usize {
    s.as_ref().map_or(0, |s| s.0.dim())
}

/// Copies the amplitudes into `out` (`len = 2 * dim` doubles).
#[no_mangle]
pub unsafe extern "C" fn kc_state_amplitudes(s: *const KcState, out: *mut f64, len: usize) -> KcStatus {
    guard(|| {
        let s = deref(s, "state")?;
        if out.is_null() {
            return Err(fail(KcStatus::KcErrNullPointer, "out is null"));
        }
        if len != 2 * s.0.dim() {
            return Err(fail(KcStatus::KcErrInvalidArgument, "buffer length must be 2 * dim"));
        }
        let dst = std::slice::from_raw_parts_mut(out, len);
        for (pair, a) in dst.chunks_exact_mut(2).zip(s.0.amplitudes()) {
            pair[0] = a.re;
            pair[1] = a.im;
        }
        Ok(())
    })
}

/// `<sigma^z_site>` with `site` in `1..=L`.
#[no_mangle]
pub unsafe extern "C" fn kc_state_sigma_z(s: *const KcState, site: usize, out: *mut f64) -> KcStatus {
    guard(|| {
        let s = deref(s, "state")?;
        let out = deref_mut(out, "out")?;
        *out = lift(s.0.sigma_z(site))?;
        Ok(())
    })
}

/// Full eigendecomposition; needs an operator on the dense path.
#[no_mangle]
pub unsafe extern "C" fn kc_spectrum_new(u: *const KcFloquet, out: *mut *mut KcSpectrum) -> KcStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        *out = ptr::null_mut();
        let u = deref(u, "operator")?;
        *out = Box::into_raw(Box::new(KcSpectrum(lift(spectral::diagonalize_floquet(&u.0))?)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn kc_spectrum_free(s: *mut KcSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn kc_spectrum_dim(s: *const KcSpectrum) -> usize {
    s.as_ref().map_or(0, |s| s.0.dim())
}

/// Ascending eigenphases in `(-pi, pi]` with `U_F |a> = exp(-i theta_a) |a>`.
#[no_mangle]
pub unsafe extern "C" fn kc_spectrum_eigenphases(s: *const KcSpectrum, out: *mut f64, len: usize) -> KcStatus {
    guard(|| {
        let s = deref(s, "spectrum")?;
        if out.is_null() {
            return Err(fail(KcStatus::KcErrNullPointer, "out is null"));
        }
        if len != s.0.dim() {
            return Err(fail(KcStatus::KcErrInvalidArgument, "buffer length must equal the dimension"));
        }
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(s.0.eigenphases());
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn kc_spectrum_diagnostics(s: *const KcSpectrum, psi0: *const KcState, out: *mut KcDiagnostics) -> KcStatus {
    guard(|| {
        let s = deref(s, "spectrum")?;
        let psi0 = deref(psi0, "psi0")?;
        let out = deref_mut(out, "out")?;
        let d = lift(SpectralDiagnostics::compute(&s.0, &psi0.0))?;
        *out = KcDiagnostics {
            ipr: d.ipr,
            staggered_mag: d.staggered_mag,
            entropy: d.entropy,
            entropy_block: d.entropy_block,
            gap_ratio: d.gap_ratio,
        };
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn kc_spectrum_thermal_fit(s: *const KcSpectrum, psi0: *const KcState, out: *mut KcThermalFit) -> KcStatus {
    guard(|| {
        let s = deref(s, "spectrum")?;
        let psi0 = deref(psi0, "psi0")?;
        let out = deref_mut(out, "out")?;
        let f = lift(spectral::effective_inverse_temperature(&s.0, &psi0.0))?;
        *out = KcThermalFit { beta_eff: f.beta_eff, epsilon_p: f.epsilon_p, residual: f.residual, saturated: f.saturated as i32 };
        Ok(())
    })
}

/// `m pi / (T (site - j0)^2)`.
#[no_mangle]
pub unsafe extern "C" fn kc_dd_kick_for_site(config: *const KcChainConfig, site: usize, m: u32, out: *mut f64) -> KcStatus {
    guard(|| {
        let cfg = to_config(deref(config, "config")?)?;
        let out = deref_mut(out, "out")?;
        *out = lift(ddcalc::kick_for_site(&cfg, site, m))?;
        Ok(())
    })
}

/// `pi / (T floor((L-1)/n_d)^2)`.
#[no_mangle]
pub unsafe extern "C" fn kc_dd_kick_for_count(l: usize, n_d: usize, t: f64, out: *mut f64) -> KcStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        *out = lift(ddcalc::kick_for_count(l, n_d, t))?;
        Ok(())
    })
}

/// `Omega T / pi`, or NaN for a null config.
#[no_mangle]
pub unsafe extern "C" fn kc_dd_rabi_frequency(config: *const KcChainConfig) -> f64 {
    match config.as_ref() {
        Some(c) => c.omega * c.t / std::f64::consts::PI,
        None => f64::NAN,
    }
}

/// Writes up to `cap` decoupled sites (1-based) to `sites` and their total
/// number to `count`; `sites` may be null when `cap` is 0.
#[no_mangle]
pub unsafe extern "C" fn kc_dd_decoupled_sites(
    config: *const KcChainConfig,
    k: f64,
    phase_tol: f64,
    sites: *mut usize,
    cap: usize,
    count: *mut usize,
) -> KcStatus {
    guard(|| {
        let cfg = to_config(deref(config, "config")?)?;
        let count = deref_mut(count, "count")?;
        if !(phase_tol >= 0.0) {
            return Err(fail(KcStatus::KcErrInvalidArgument, "phase tolerance must be >= 0"));
        }
        let found = ddcalc::decoupled_sites(&cfg, k, phase_tol);
        *count = found.len();
        if cap > 0 {
            if sites.is_null() {
                return Err(fail(KcStatus::KcErrNullPointer, "sites is null"));
            }
            let n = cap.min(found.len());
            std::slice::from_raw_parts_mut(sites, n).copy_from_slice(&found[..n]);
        }
        Ok(())
    })
}
