//! C ABI for the two-qubit teleportation-resource library.
//!
//! States travel as opaque `FefState` handles created by
//! [`fefkit_state_new`] or [`fefkit_border_state`] and released with
//! [`fefkit_state_free`]. Every function returns a [`FefStatus`]; on any
//! status other than `Ok` a thread-local message describing the failure is
//! retrievable with [`fefkit_last_error_message`]. Matrix buffers are
//! row-major `double` arrays of length 16 (4×4), split into real and
//! imaginary parts.
//!
//! The companion header `include/fefkit.h` is regenerated by the build
//! script on every compile.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use fefkit::channels::{amplitude_damping, amplitude_damping_toward_one, apply_one_sided};
use fefkit::criteria::reduction_check;
use fefkit::fef::{fef_closed_form, n_value, singlet_fraction, teleport_fidelity_from_f};
use fefkit::improve::{best_improvement, border_state};
use fefkit::linalg::{ComplexMatrix, Subsystem};
use fefkit::optimize::{max_overlap_sdp, SdpConfig};
use fefkit::state::TwoQubitState;
use fefkit::teleport::{average_fidelity_exact, sts_channel};
use fefkit::Error;
use num_complex::Complex64;

/// Opaque two-qubit state handle.
pub struct FefState(TwoQubitState);

/// Result code of every call in this interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FefStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// The input is not a valid density matrix, or lacks the matrix form a
    /// closed-form operation needs.
    InvalidState = 2,
    /// A scalar argument is outside its documented range.
    OutOfRange = 3,
    /// The optimizer stopped before reaching its feasibility tolerance.
    NonConvergence = 4,
    /// Unexpected internal failure.
    Internal = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let stored = CString::new(message)
        .unwrap_or_else(|_| CString::new("error message contained a NUL byte").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(stored));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn fail(status: FefStatus, message: String) -> FefStatus {
    set_error(message);
    status
}

fn status_for(err: &Error) -> FefStatus {
    match err {
        Error::OutOfRange { .. } | Error::InvalidProbabilities { .. } => FefStatus::OutOfRange,
        Error::NonConvergence { .. } => FefStatus::NonConvergence,
        _ => FefStatus::InvalidState,
    }
}

/// Run a call body, converting panics into `Internal` instead of letting
/// them unwind across the C boundary.
fn guarded<F: FnOnce() -> FefStatus>(body: F) -> FefStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(FefStatus::Internal, "internal panic".into()),
    }
}

fn side_from(side: i32) -> Result<Subsystem, FefStatus> {
    match side {
        0 => Ok(Subsystem::A),
        1 => Ok(Subsystem::B),
        other => Err(fail(
            FefStatus::OutOfRange,
            format!("side must be 0 (A) or 1 (B), got {other}"),
        )),
    }
}

unsafe fn emit(state: TwoQubitState, out: *mut *mut FefState) -> FefStatus {
    // SAFETY: Caller guarantees `out` is a valid pointer; null was checked
    // before calling.
    *out = Box::into_raw(Box::new(FefState(state)));
    FefStatus::Ok
}

/// Build a state handle from row-major 4×4 real and imaginary parts.
///
/// Validation matches the library: Hermitian, unit trace, positive up to a
/// small floor. On success `*out` owns the new handle.
///
/// # Safety
/// `re` and `im` must point to 16 readable doubles each; `out` must be a
/// valid writable pointer. The buffers may not alias `out`.
#[no_mangle]
pub unsafe extern "C" fn fefkit_state_new(
    re: *const f64,
    im: *const f64,
    out: *mut *mut FefState,
) -> FefStatus {
    guarded(|| {
        if re.is_null() || im.is_null() || out.is_null() {
            return fail(FefStatus::NullPointer, "re, im and out must be non-null".into());
        }
        let mut m = ComplexMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                // SAFETY: Caller guarantees 16 readable doubles per buffer.
                let z = Complex64::new(*re.add(4 * i + j), *im.add(4 * i + j));
                m.set(i, j, z);
            }
        }
        match TwoQubitState::new(m) {
            Ok(state) => emit(state, out),
            Err(err) => fail(status_for(&err), err.to_string()),
        }
    })
}

/// Build the border state: the improvable state with f exactly ½.
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fefkit_border_state(out: *mut *mut FefState) -> FefStatus {
    guarded(|| {
        if out.is_null() {
            return fail(FefStatus::NullPointer, "out must be non-null".into());
        }
        emit(border_state(), out)
    })
}

/// Release a state handle. Null is ignored.
///
/// # Safety
/// `state` must be null or a pointer previously returned through an `out`
/// parameter of this interface and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fefkit_state_free(state: *mut FefState) {
    if state.is_null() {
        return;
    }
    // SAFETY: Caller guarantees the handle came from this interface.
    drop(Box::from_raw(state));
}

/// Copy the state's matrix into row-major real and imaginary buffers.
///
/// # Safety
/// `state` must be a live handle; `re` and `im` must point to 16 writable
/// doubles each.
#[no_mangle]
pub unsafe extern "C" fn fefkit_state_entries(
    state: *const FefState,
    re: *mut f64,
    im: *mut f64,
) -> FefStatus {
    guarded(|| {
        if state.is_null() || re.is_null() || im.is_null() {
            return fail(FefStatus::NullPointer, "state, re and im must be non-null".into());
        }
        // SAFETY: Caller guarantees a live handle and 16 writable doubles
        // per buffer.
        let matrix = (*state).0.matrix();
        for i in 0..4 {
            for j in 0..4 {
                let z = matrix.get(i, j);
                *re.add(4 * i + j) = z.re;
                *im.add(4 * i + j) = z.im;
            }
        }
        FefStatus::Ok
    })
}

/// Fully entangled fraction of the state (closed form).
///
/// `attained_on_singlet` is set to 1 when the maximum is reached on the
/// singlet, 0 otherwise; pass null to skip it.
///
/// # Safety
/// `state` must be a live handle; `value` must be writable;
/// `attained_on_singlet` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn fefkit_fef(
    state: *const FefState,
    value: *mut f64,
    attained_on_singlet: *mut i32,
) -> FefStatus {
    guarded(|| {
        if state.is_null() || value.is_null() {
            return fail(FefStatus::NullPointer, "state and value must be non-null".into());
        }
        // SAFETY: Caller guarantees a live handle and writable outputs.
        let result = fef_closed_form(&(*state).0);
        *value = result.value;
        if !attained_on_singlet.is_null() {
            *attained_on_singlet = i32::from(result.attained_on_singlet);
        }
        FefStatus::Ok
    })
}

/// Overlap of the state with the singlet.
///
/// # Safety
/// `state` must be a live handle; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fefkit_singlet_fraction(
    state: *const FefState,
    value: *mut f64,
) -> FefStatus {
    guarded(|| {
        if state.is_null() || value.is_null() {
            return fail(FefStatus::NullPointer, "state and value must be non-null".into());
        }
        // SAFETY: Caller guarantees a live handle and a writable output.
        *value = singlet_fraction(&(*state).0);
        FefStatus::Ok
    })
}

/// Trace norm of the correlation matrix; N ≤ 1 exactly when f ≤ ½.
///
/// # Safety
/// `state` must be a live handle; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fefkit_n_value(state: *const FefState, value: *mut f64) -> FefStatus {
    guarded(|| {
        if state.is_null() || value.is_null() {
            return fail(FefStatus::NullPointer, "state and value must be non-null".into());
        }
        // SAFETY: Caller guarantees a live handle and a writable output.
        *value = n_value(&(*state).0);
        FefStatus::Ok
    })
}

/// Teleportation fidelity (f·d + 1)/(d + 1) for resource dimension `d`.
///
/// # Safety
/// `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fefkit_teleport_fidelity(
    f: f64,
    d: u32,
    value: *mut f64,
) -> FefStatus {
    guarded(|| {
        if value.is_null() {
            return fail(FefStatus::NullPointer, "value must be non-null".into());
        }
        match teleport_fidelity_from_f(f, d) {
            Ok(fidelity) => {
                // SAFETY: Caller guarantees a writable output.
                *value = fidelity;
                FefStatus::Ok
            }
            Err(err) => fail(status_for(&err), err.to_string()),
        }
    })
}

/// Minimum eigenvalues of both reduction operators, with violation flags
/// (1 when the minimum is below the violation threshold).
///
/// # Safety
/// `state` must be a live handle; all four outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn fefkit_reduction_check(
    state: *const FefState,
    min_eig_a: *mut f64,
    min_eig_b: *mut f64,
    violated_a: *mut i32,
    violated_b: *mut i32,
) -> FefStatus {
    guarded(|| {
        if state.is_null()
            || min_eig_a.is_null()
            || min_eig_b.is_null()
            || violated_a.is_null()
            || violated_b.is_null()
        {
            return fail(FefStatus::NullPointer, "all arguments must be non-null".into());
        }
        // SAFETY: Caller guarantees a live handle and writable outputs.
        let report = reduction_check(&(*state).0);
        *min_eig_a = report.min_eig_a;
        *min_eig_b = report.min_eig_b;
        *violated_a = i32::from(report.violated_a);
        *violated_b = i32::from(report.violated_b);
        FefStatus::Ok
    })
}

/// Best one-sided damping improvement of a family-form state.
///
/// Writes the acting side (0 = A, 1 = B), the optimal angle, the predicted
/// gain, f before and after, and a new handle holding the transformed
/// state. Returns `InvalidState` when the state lacks the family zero
/// pattern.
///
/// # Safety
/// `state` must be a live handle; all outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn fefkit_best_improvement(
    state: *const FefState,
    side: *mut i32,
    theta: *mut f64,
    delta: *mut f64,
    f_before: *mut f64,
    f_after: *mut f64,
    transformed: *mut *mut FefState,
) -> FefStatus {
    guarded(|| {
        if state.is_null()
            || side.is_null()
            || theta.is_null()
            || delta.is_null()
            || f_before.is_null()
            || f_after.is_null()
            || transformed.is_null()
        {
            return fail(FefStatus::NullPointer, "all arguments must be non-null".into());
        }
        // SAFETY: Caller guarantees a live handle and writable outputs.
        match best_improvement(&(*state).0) {
            Ok(report) => {
                *side = match report.variant.side() {
                    Subsystem::A => 0,
                    Subsystem::B => 1,
                };
                *theta = report.theta_star;
                *delta = report.predicted_delta;
                *f_before = report.f_before;
                *f_after = report.f_after_recomputed;
                emit(report.transformed, transformed)
            }
            Err(err) => fail(status_for(&err), err.to_string()),
        }
    })
}

/// Apply one-sided amplitude damping at angle `theta` to side 0 (A) or
/// 1 (B); `toward_one` nonzero damps toward |1⟩ instead of |0⟩. On success
/// `*out` owns the transformed state.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fefkit_apply_damping(
    state: *const FefState,
    theta: f64,
    side: i32,
    toward_one: i32,
    out: *mut *mut FefState,
) -> FefStatus {
    guarded(|| {
        if state.is_null() || out.is_null() {
            return fail(FefStatus::NullPointer, "state and out must be non-null".into());
        }
        let subsystem = match side_from(side) {
            Ok(subsystem) => subsystem,
            Err(status) => return status,
        };
        let channel = if toward_one != 0 {
            amplitude_damping_toward_one(theta)
        } else {
            amplitude_damping(theta)
        };
        match channel {
            Ok(channel) => {
                // SAFETY: Caller guarantees a live handle.
                emit(apply_one_sided(&(*state).0, &channel, subsystem), out)
            }
            Err(err) => fail(status_for(&err), err.to_string()),
        }
    })
}

/// Exact average fidelity of teleporting through the state with the
/// standard scheme.
///
/// # Safety
/// `state` must be a live handle; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fefkit_sts_exact_fidelity(
    state: *const FefState,
    value: *mut f64,
) -> FefStatus {
    guarded(|| {
        if state.is_null() || value.is_null() {
            return fail(FefStatus::NullPointer, "state and value must be non-null".into());
        }
        // SAFETY: Caller guarantees a live handle and a writable output.
        *value = average_fidelity_exact(&sts_channel(&(*state).0));
        FefStatus::Ok
    })
}

/// Certified lower bound on f after the best channel on one side
/// (projected gradient ascent with the default configuration and the given
/// seed).
///
/// `converged` is set to 1 when the feasibility gap closed below
/// tolerance. On `NonConvergence` the best value found is still written
/// when one exists.
///
/// # Safety
/// `state` must be a live handle; `value` and `converged` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn fefkit_max_overlap(
    state: *const FefState,
    side: i32,
    seed: u64,
    value: *mut f64,
    converged: *mut i32,
) -> FefStatus {
    guarded(|| {
        if state.is_null() || value.is_null() || converged.is_null() {
            return fail(
                FefStatus::NullPointer,
                "state, value and converged must be non-null".into(),
            );
        }
        let subsystem = match side_from(side) {
            Ok(subsystem) => subsystem,
            Err(status) => return status,
        };
        let config = SdpConfig { seed, ..SdpConfig::default() };
        // SAFETY: Caller guarantees a live handle and writable outputs.
        match max_overlap_sdp(&(*state).0, subsystem, &config) {
            Ok(result) => {
                *value = result.value;
                *converged = i32::from(result.converged);
                FefStatus::Ok
            }
            Err(Error::NonConvergence { gap, iterations, best_value }) => {
                if let Some(best) = best_value {
                    *value = best;
                }
                *converged = 0;
                fail(
                    FefStatus::NonConvergence,
                    format!("feasibility gap {gap:.3e} after {iterations} iterations"),
                )
            }
            Err(err) => fail(status_for(&err), err.to_string()),
        }
    })
}

/// Copy the last error message of the current thread into `buffer`.
///
/// Returns the full message length including the trailing NUL, or 0 when
/// no error is stored. The copy is truncated (still NUL-terminated) when
/// `length` is too small; call with a null buffer to query the required
/// length.
///
/// # Safety
/// `buffer` must be null or point to `length` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn fefkit_last_error_message(
    buffer: *mut c_char,
    length: usize,
) -> usize {
    LAST_ERROR.with(|slot| {
        let borrowed = slot.borrow();
        let Some(message) = borrowed.as_ref() else {
            return 0;
        };
        let bytes = message.as_bytes_with_nul();
        if !buffer.is_null() && length > 0 {
            let copied = bytes.len().min(length);
            // SAFETY: Caller guarantees `length` writable bytes; `copied`
            // never exceeds either buffer.
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buffer, copied);
            *buffer.add(copied - 1) = 0;
        }
        bytes.len()
    })
}
