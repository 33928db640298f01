//! C interface to `pme`.
//!
//! States live behind the opaque `PmeState` handle, created by the
//! `pme_state_*` constructors and released with `pme_state_free`. Every
//! fallible call returns a `PmeStatus`; on failure `pme_last_error` gives a
//! message for the calling thread. Complex numbers cross the boundary as
//! interleaved `re, im` pairs of doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use pme::constructors::{circuit_psi, circuit_xi, dimerized_bell, ghz, haar_unitary};
use pme::families4::{classify_four_qubit, family_b, FamilyTag};
use pme::planar::{cyclic_window, VerificationReport};
use pme::protocols::{canonical_pair, qss_decode, qss_encode, teleport_setup};
use pme::statefile::{read_state_file, write_state_file};
use pme::statevec::fidelity;
use pme::{verify_ame, verify_pme, Complex64, PmeError, PureState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PmeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Precondition = 3,
    Verification = 4,
    Unauthorized = 5,
    Resource = 6,
    Parse = 7,
    Io = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

/// Four-qubit family labels.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PmeFamily {
    FamilyA = 0,
    FamilyAShifted = 1,
    FamilyB = 2,
    Intersection = 3,
    PmeUnclassified = 4,
    NotPme = 5,
}

impl From<FamilyTag> for PmeFamily {
    fn from(t: FamilyTag) -> Self {
        match t {
            FamilyTag::FamilyA => PmeFamily::FamilyA,
            FamilyTag::FamilyAShifted => PmeFamily::FamilyAShifted,
            FamilyTag::FamilyB => PmeFamily::FamilyB,
            FamilyTag::Intersection => PmeFamily::Intersection,
            FamilyTag::PmeUnclassified => PmeFamily::PmeUnclassified,
            FamilyTag::NotPme => PmeFamily::NotPme,
        }
    }
}

/// Opaque pure state.
pub struct PmeState {
    inner: PureState,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &PmeError) -> PmeStatus {
    match e {
        PmeError::Input(_) => PmeStatus::InvalidInput,
        PmeError::Precondition(_) => PmeStatus::Precondition,
        PmeError::Verification { .. } => PmeStatus::Verification,
        PmeError::Authorization(_) => PmeStatus::Unauthorized,
        PmeError::Resource(_) => PmeStatus::Resource,
        PmeError::Parse { .. } => PmeStatus::Parse,
        PmeError::Io(_) => PmeStatus::Io,
    }
}

struct Failure(PmeStatus, String);

impl From<PmeError> for Failure {
    fn from(e: PmeError) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PmeStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording errors and panics for `pme_last_error`.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PmeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            PmeStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PmeStatus::Panic
        }
    }
}

unsafe fn state_ref<'a>(s: *const PmeState) -> Result<&'a PureState, Failure> {
    s.as_ref().map(|s| &s.inner).ok_or_else(|| null("state"))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn emit_state(out: *mut *mut PmeState, s: PureState) -> Result<(), Failure> {
    put(out, Box::into_raw(Box::new(PmeState { inner: s })), "out")
}

unsafe fn complex_slice(ptr_re_im: *const f64, count: usize) -> Result<Vec<Complex64>, Failure> {
    if ptr_re_im.is_null() {
        return Err(null("amplitude buffer"));
    }
    let raw = std::slice::from_raw_parts(ptr_re_im, 2 * count);
    Ok(raw.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect())
}

unsafe fn path_arg(path: *const c_char) -> Result<String, Failure> {
    if path.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(path)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| Failure(PmeStatus::InvalidInput, "path is not UTF-8".into()))
}

/// Message for the last failed call on this thread; empty after success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn pme_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `state` must come from a `pme_state_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pme_state_free(state: *mut PmeState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pme_state_ghz(n: usize, d: usize, out: *mut *mut PmeState) -> PmeStatus {
    guard(|| emit_state(out, ghz(n, d)?))
}

/// `2n` sites with Bell pairs on `(k, k+n)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pme_state_dimerized_bell(n: usize, d: usize, out: *mut *mut PmeState) -> PmeStatus {
    guard(|| emit_state(out, dimerized_bell(n, d)?))
}

fn seeded_unitaries(n: usize, d: usize, seed: u64) -> Vec<pme::ComplexMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n.saturating_sub(1)).map(|_| haar_unitary(d, &mut rng)).collect()
}

/// Gate chain on the `2n`-site dimer with seeded Haar unitaries; matches
/// `pme construct circuit-psi --seed`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pme_state_circuit_psi(n: usize, d: usize, seed: u64, out: *mut *mut PmeState) -> PmeStatus {
    guard(|| emit_state(out, circuit_psi(n, d, &seeded_unitaries(n, d, seed))?))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pme_state_circuit_xi(n: usize, d: usize, seed: u64, out: *mut *mut PmeState) -> PmeStatus {
    guard(|| emit_state(out, circuit_xi(n, d, &seeded_unitaries(n, d, seed))?))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pme_state_family_b(
    phi: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    out: *mut *mut PmeState,
) -> PmeStatus {
    guard(|| emit_state(out, family_b(phi, alpha, beta, gamma, delta)))
}

/// Copies `d^n` interleaved amplitudes into a new state. No normalization
/// is applied.
///
/// # Safety
/// `re_im` must hold `2 d^n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pme_state_from_amplitudes(
    n: usize,
    d: usize,
    re_im: *const f64,
    out: *mut *mut PmeState,
) -> PmeStatus {
    guard(|| {
        let len = pme::statevec::register_len(n, d)?;
        let amps = complex_slice(re_im, len)?;
        emit_state(out, PureState::new(n, d, amps)?)
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pme_state_read(path: *const c_char, out: *mut *mut PmeState) -> PmeStatus {
    guard(|| emit_state(out, read_state_file(path_arg(path)?)?))
}

/// # Safety
/// `state` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pme_state_write(state: *const PmeState, path: *const c_char) -> PmeStatus {
    guard(|| Ok(write_state_file(path_arg(path)?, state_ref(state)?)?))
}

/// Site count, local dimension and amplitude count.
///
/// # Safety
/// `state` must be a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn pme_state_shape(
    state: *const PmeState,
    num_sites: *mut usize,
    local_dim: *mut usize,
    len: *mut usize,
) -> PmeStatus {
    guard(|| {
        let s = state_ref(state)?;
        put(num_sites, s.num_sites(), "num_sites")?;
        put(local_dim, s.local_dim(), "local_dim")?;
        put(len, s.amplitudes().len(), "len")
    })
}

/// Writes the amplitudes as interleaved pairs into `re_im`, which must hold
/// `2 * capacity` doubles; fails with `PME_STATUS_BUFFER_TOO_SMALL` when
/// `capacity` is below the amplitude count.
///
/// # Safety
/// `state` must be a live handle; `re_im` must hold `2 * capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn pme_state_amplitudes(state: *const PmeState, re_im: *mut f64, capacity: usize) -> PmeStatus {
    guard(|| {
        let amps = state_ref(state)?.amplitudes();
        if capacity < amps.len() {
            return Err(Failure(
                PmeStatus::BufferTooSmall,
                format!("need {} amplitudes, buffer holds {capacity}", amps.len()),
            ));
        }
        if re_im.is_null() {
            return Err(null("amplitude buffer"));
        }
        let dst = std::slice::from_raw_parts_mut(re_im, 2 * amps.len());
        for (pair, z) in dst.chunks_exact_mut(2).zip(amps) {
            pair[0] = z.re;
            pair[1] = z.im;
        }
        Ok(())
    })
}

unsafe fn report_out(r: VerificationReport, pass: *mut bool, max_deviation: *mut f64) -> Result<(), Failure> {
    put(pass, r.overall_pass, "pass")?;
    if !max_deviation.is_null() {
        max_deviation.write(r.max_deviation());
    }
    Ok(())
}

/// Planar check over all connected half windows. `max_deviation` may be null.
///
/// # Safety
/// `state` must be a live handle; `pass` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pme_verify_pme(
    state: *const PmeState,
    tol: f64,
    pass: *mut bool,
    max_deviation: *mut f64,
) -> PmeStatus {
    guard(|| report_out(verify_pme(state_ref(state)?, tol)?, pass, max_deviation))
}

/// Check over every subset of half the sites. `max_deviation` may be null.
///
/// # Safety
/// `state` must be a live handle; `pass` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pme_verify_ame(
    state: *const PmeState,
    tol: f64,
    pass: *mut bool,
    max_deviation: *mut f64,
) -> PmeStatus {
    guard(|| report_out(verify_ame(state_ref(state)?, tol)?, pass, max_deviation))
}

/// # Safety
/// `state` must be a live handle; `family` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pme_classify_four_qubit(state: *const PmeState, tol: f64, family: *mut PmeFamily) -> PmeStatus {
    guard(|| {
        let class = classify_four_qubit(state_ref(state)?, tol)?;
        put(family, class.tag.into(), "family")
    })
}

/// Fidelity with the canonical pair after undoing the transfer unitary of
/// the half window starting at `start`.
///
/// # Safety
/// `state` must be a live handle; `fid` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pme_teleport_fidelity(state: *const PmeState, start: usize, fid: *mut f64) -> PmeStatus {
    guard(|| {
        let s = state_ref(state)?;
        let n = s.num_sites();
        let p = cyclic_window(n, start, n / 2)?;
        if !p.is_balanced() {
            return Err(Failure(PmeStatus::InvalidInput, format!("{n} sites cannot be halved")));
        }
        let out = teleport_setup(s, &p)?;
        put(fid, fidelity(&out, &canonical_pair(n, s.local_dim(), &p)?)?, "fidelity")
    })
}

/// Encodes `secret` (`d` interleaved pairs) at `distributor`, decodes on the
/// players `window[0..window_len]` and writes the recovered qudit into
/// `recovered` (`2d` doubles) and the player holding it into `bob`.
///
/// # Safety
/// `state` must be a live handle and every buffer sized as described.
#[no_mangle]
pub unsafe extern "C" fn pme_qss_round_trip(
    state: *const PmeState,
    distributor: usize,
    secret: *const f64,
    window: *const usize,
    window_len: usize,
    recovered: *mut f64,
    bob: *mut usize,
) -> PmeStatus {
    guard(|| {
        let s = state_ref(state)?;
        let d = s.local_dim();
        let secret = complex_slice(secret, d)?;
        if window.is_null() {
            return Err(null("window"));
        }
        let window = std::slice::from_raw_parts(window, window_len);
        let shares = qss_encode(s, distributor, &secret)?;
        let rec = qss_decode(&shares, window)?;
        if recovered.is_null() {
            return Err(null("recovered"));
        }
        let dst = std::slice::from_raw_parts_mut(recovered, 2 * d);
        for (pair, z) in dst.chunks_exact_mut(2).zip(&rec.recovered) {
            pair[0] = z.re;
            pair[1] = z.im;
        }
        put(bob, rec.bob, "bob")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn errors_are_recorded_per_call() {
        let mut s = ptr::null_mut();
        unsafe {
            assert_eq!(pme_state_ghz(3, 1, &mut s), PmeStatus::InvalidInput);
            let msg = CStr::from_ptr(pme_last_error()).to_str().unwrap();
            assert!(msg.contains("at least 2"), "{msg}");
            assert_eq!(pme_state_ghz(3, 2, &mut s), PmeStatus::Ok);
            assert_eq!(CStr::from_ptr(pme_last_error()).to_bytes(), b"");
            pme_state_free(s);
        }
    }

    #[test]
    fn null_handles_are_rejected() {
        let mut pass = false;
        unsafe {
            assert_eq!(pme_verify_pme(ptr::null(), 1e-10, &mut pass, ptr::null_mut()), PmeStatus::NullPointer);
            assert_eq!(pme_state_ghz(3, 2, ptr::null_mut()), PmeStatus::NullPointer);
            pme_state_free(ptr::null_mut());
        }
    }
}
