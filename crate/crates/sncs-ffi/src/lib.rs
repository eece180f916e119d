//! C ABI over the sncs library: status codes in, plain structs out, and an
//! opaque handle for built supercoherent states. The generated header lands
//! in include/sncs.h.
//!
//! Every entry point catches panics, so nothing unwinds across the boundary.

use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use sncs::coherent::{closed_form_moments, oracle_spinor_moments, CoherentLabel};
use sncs::fock::{DeformationKind, SpinorState, DEFAULT_DIM};
use sncs::geomphase::{closed_form_beta, geometric_phase_oracle};
use sncs::hypergeom::f02;
use sncs::supercoherent::{
    build_superposition, closed_form_spinor_moments, SuperCoherentSpec, SuperpositionParams,
};
use sncs::susy::{sao_matrix, KMatrix};
use sncs::{C64, Error};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SncsStatus {
    Ok = 0,
    InvalidArgument = 1,
    Convergence = 2,
    Truncation = 3,
    WrongFamily = 4,
    NoEigenvector = 5,
    ZeroNorm = 6,
    Io = 7,
    Internal = 8,
}

/// Deformation of the annihilation operator.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SncsKind {
    /// f(N) = 1.
    Linear = 0,
    /// f(N) = N + 1.
    ShiftedNumber = 1,
    /// f(N) = N.
    Number = 2,
}

impl From<SncsKind> for DeformationKind {
    fn from(kind: SncsKind) -> Self {
        match kind {
            SncsKind::Linear => DeformationKind::Linear,
            SncsKind::ShiftedNumber => DeformationKind::ShiftedNumber,
            SncsKind::Number => DeformationKind::Number,
        }
    }
}

/// Quadrature means, variances and the Heisenberg product
/// (hbar = m = omega = 1).
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SncsUncertainty {
    pub mean_x: f64,
    pub mean_p: f64,
    pub mean_x2: f64,
    pub mean_p2: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub product: f64,
}

impl From<sncs::coherent::UncertaintyReport> for SncsUncertainty {
    fn from(r: sncs::coherent::UncertaintyReport) -> Self {
        Self {
            mean_x: r.mean_x,
            mean_p: r.mean_p,
            mean_x2: r.mean_x2,
            mean_p2: r.mean_p2,
            var_x: r.var_x,
            var_p: r.var_p,
            product: r.product,
        }
    }
}

fn status_of(err: &Error) -> SncsStatus {
    match err {
        Error::Domain(_) => SncsStatus::InvalidArgument,
        Error::Convergence { .. } => SncsStatus::Convergence,
        Error::Truncation { .. } => SncsStatus::Truncation,
        Error::WrongFamily { .. } => SncsStatus::WrongFamily,
        Error::NoEigenvector { .. } => SncsStatus::NoEigenvector,
        Error::ZeroNorm => SncsStatus::ZeroNorm,
        Error::DimensionMismatch(_) => SncsStatus::InvalidArgument,
        Error::Io(_) => SncsStatus::Io,
    }
}

fn guarded<F: FnOnce() -> SncsStatus>(f: F) -> SncsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => SncsStatus::Internal,
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn sncs_status_message(status: SncsStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        SncsStatus::Ok => b"ok\0",
        SncsStatus::InvalidArgument => b"invalid argument\0",
        SncsStatus::Convergence => b"series did not converge\0",
        SncsStatus::Truncation => b"truncation too small for this amplitude\0",
        SncsStatus::WrongFamily => b"wrong K-matrix family for this construction\0",
        SncsStatus::NoEigenvector => b"no eigenvector at the requested tolerance\0",
        SncsStatus::ZeroNorm => b"state has zero norm\0",
        SncsStatus::Io => b"i/o error\0",
        SncsStatus::Internal => b"internal error\0",
    };
    msg.as_ptr() as *const c_char
}

/// The library's default Fock truncation.
#[no_mangle]
pub extern "C" fn sncs_default_dim() -> usize {
    DEFAULT_DIM
}

/// Generalized hypergeometric 0F2(b1, b2; x) for complex x.
///
/// # Safety
/// `out_re` and `out_im` must be valid writable pointers.
#[no_mangle]
pub unsafe extern "C" fn sncs_f02(
    b1: f64,
    b2: f64,
    x_re: f64,
    x_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> SncsStatus {
    if out_re.is_null() || out_im.is_null() {
        return SncsStatus::InvalidArgument;
    }
    guarded(|| match f02(b1, b2, C64::new(x_re, x_im)) {
        Ok(v) => {
            unsafe {
                *out_re = v.re;
                *out_im = v.im;
            }
            SncsStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Closed-form quadrature moments of one coherent state.
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sncs_scalar_moments(
    kind: SncsKind,
    alpha_re: f64,
    alpha_im: f64,
    out: *mut SncsUncertainty,
) -> SncsStatus {
    if out.is_null() {
        return SncsStatus::InvalidArgument;
    }
    guarded(|| {
        match closed_form_moments(CoherentLabel::new(
            kind.into(),
            C64::new(alpha_re, alpha_im),
        )) {
            Ok(rep) => {
                unsafe { *out = rep.into() };
                SncsStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

fn theta_spec(
    kind: SncsKind,
    theta: f64,
    eig_re: f64,
    eig_im: f64,
) -> sncs::Result<SuperCoherentSpec> {
    let k = KMatrix::theta_family(theta)?;
    Ok(SuperCoherentSpec::new(
        k,
        kind.into(),
        C64::new(eig_re, eig_im),
    ))
}

/// Closed-form uncertainties of the theta-family superposition
/// cos(eta) |+> + exp(i lambda) sin(eta) |-> (generic family only).
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sncs_spinor_moments(
    kind: SncsKind,
    theta: f64,
    eig_re: f64,
    eig_im: f64,
    eta: f64,
    lambda: f64,
    out: *mut SncsUncertainty,
) -> SncsStatus {
    if out.is_null() {
        return SncsStatus::InvalidArgument;
    }
    guarded(|| {
        let result = theta_spec(kind, theta, eig_re, eig_im).and_then(|spec| {
            closed_form_spinor_moments(&spec, &SuperpositionParams::new(eta, lambda))
        });
        match result {
            Ok(rep) => {
                unsafe { *out = rep.into() };
                SncsStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Closed-form geometric phase of the theta-family superposition.
///
/// # Safety
/// `out_beta` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sncs_geometric_phase(
    kind: SncsKind,
    theta: f64,
    eig_re: f64,
    eig_im: f64,
    eta: f64,
    lambda: f64,
    omega: f64,
    out_beta: *mut f64,
) -> SncsStatus {
    if out_beta.is_null() {
        return SncsStatus::InvalidArgument;
    }
    guarded(|| {
        let result = theta_spec(kind, theta, eig_re, eig_im).and_then(|spec| {
            closed_form_beta(&spec, &SuperpositionParams::new(eta, lambda), omega)
        });
        match result {
            Ok(r) => {
                unsafe { *out_beta = r.beta };
                SncsStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// An explicitly built (normalized) supercoherent superposition state,
/// remembering what it was built from.
pub struct SncsState {
    spec: SuperCoherentSpec,
    state: SpinorState,
}

/// Build the normalized theta-family superposition state in a truncated
/// Fock space; pass dim = 0 for the library default.
///
/// # Safety
/// `out` must be a valid writable pointer; the returned handle must be
/// released with `sncs_state_free`.
#[no_mangle]
pub unsafe extern "C" fn sncs_state_new(
    kind: SncsKind,
    theta: f64,
    eig_re: f64,
    eig_im: f64,
    eta: f64,
    lambda: f64,
    dim: usize,
    out: *mut *mut SncsState,
) -> SncsStatus {
    if out.is_null() {
        return SncsStatus::InvalidArgument;
    }
    guarded(|| {
        let dim = if dim == 0 { DEFAULT_DIM } else { dim };
        let result = theta_spec(kind, theta, eig_re, eig_im).and_then(|spec| {
            let state = build_superposition(&spec, &SuperpositionParams::new(eta, lambda), dim)?;
            Ok(SncsState { spec, state })
        });
        match result {
            Ok(handle) => {
                unsafe { *out = Box::into_raw(Box::new(handle)) };
                SncsStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Release a state handle. Null is a no-op.
///
/// # Safety
/// `state` must be null or a pointer obtained from `sncs_state_new` that
/// has not been freed before.
#[no_mangle]
pub unsafe extern "C" fn sncs_state_free(state: *mut SncsState) {
    if !state.is_null() {
        drop(unsafe { Box::from_raw(state) });
    }
}

/// Fock truncation of a built state.
///
/// # Safety
/// `state` must be a live handle from `sncs_state_new`.
#[no_mangle]
pub unsafe extern "C" fn sncs_state_dim(state: *const SncsState) -> usize {
    if state.is_null() {
        return 0;
    }
    unsafe { &*state }.state.dim()
}

/// Read one spinor coefficient; component 0 is the upper block, 1 the lower.
///
/// # Safety
/// `state` must be a live handle; `out_re`/`out_im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sncs_state_coeff(
    state: *const SncsState,
    component: u32,
    n: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> SncsStatus {
    if state.is_null() || out_re.is_null() || out_im.is_null() {
        return SncsStatus::InvalidArgument;
    }
    let handle = unsafe { &*state };
    if n >= handle.state.dim() || component > 1 {
        return SncsStatus::InvalidArgument;
    }
    let c = if component == 0 {
        handle.state.upper().coeff(n)
    } else {
        handle.state.lower().coeff(n)
    };
    unsafe {
        *out_re = c.re;
        *out_im = c.im;
    }
    SncsStatus::Ok
}

/// Quadrature moments of a built state through the truncated-matrix path.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sncs_state_moments(
    state: *const SncsState,
    out: *mut SncsUncertainty,
) -> SncsStatus {
    if state.is_null() || out.is_null() {
        return SncsStatus::InvalidArgument;
    }
    guarded(|| {
        let handle = unsafe { &*state };
        match oracle_spinor_moments(&handle.state) {
            Ok(rep) => {
                unsafe { *out = rep.into() };
                SncsStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Relative eigen-residual of a built state under its own annihilation
/// operator, with the top two Fock levels excluded.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sncs_state_eigen_residual(
    state: *const SncsState,
    out: *mut f64,
) -> SncsStatus {
    if state.is_null() || out.is_null() {
        return SncsStatus::InvalidArgument;
    }
    guarded(|| {
        let handle = unsafe { &*state };
        match sao_matrix(&handle.spec.k, handle.spec.kind, handle.state.dim()) {
            Ok(a) => {
                let r = sncs::fock::spinor_eigen_residual(
                    &a,
                    handle.spec.eigenvalue,
                    &handle.state,
                    2,
                );
                unsafe { *out = r };
                SncsStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Geometric phase of a built state via the Hamiltonian expectation.
///
/// # Safety
/// `state` must be a live handle; `out_beta` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sncs_state_geometric_phase(
    state: *const SncsState,
    omega: f64,
    out_beta: *mut f64,
) -> SncsStatus {
    if state.is_null() || out_beta.is_null() {
        return SncsStatus::InvalidArgument;
    }
    guarded(|| {
        let handle = unsafe { &*state };
        match geometric_phase_oracle(&handle.state, omega) {
            Ok(r) => {
                unsafe { *out_beta = r.beta };
                SncsStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}
