//! Exercise the C surface from Rust: same ABI, no header involved.

use std::f64::consts::PI;
use std::ptr;

use sncs_ffi::*;

#[test]
fn f02_matches_frozen_value() {
    let (mut re, mut im) = (0.0, 0.0);
    let status = unsafe { sncs_f02(1.0, 1.0, 1.0, 0.0, &mut re, &mut im) };
    assert_eq!(status, SncsStatus::Ok);
    assert!((re - 2.129_702_548_983_306_4).abs() < 1e-13);
    assert_eq!(im, 0.0);
}

#[test]
fn f02_rejects_bad_lower_parameter() {
    let (mut re, mut im) = (0.0, 0.0);
    let status = unsafe { sncs_f02(0.0, 1.0, 1.0, 0.0, &mut re, &mut im) };
    assert_eq!(status, SncsStatus::InvalidArgument);
    let status = unsafe { sncs_f02(1.0, 1.0, 1.0, 0.0, ptr::null_mut(), &mut im) };
    assert_eq!(status, SncsStatus::InvalidArgument);
}

#[test]
fn scalar_moments_limits() {
    let mut out = SncsUncertainty::default();
    let status = unsafe { sncs_scalar_moments(SncsKind::ShiftedNumber, 0.0, 0.0, &mut out) };
    assert_eq!(status, SncsStatus::Ok);
    assert!((out.product - 0.5).abs() < 1e-12);

    let status = unsafe { sncs_scalar_moments(SncsKind::Number, 0.0, 0.0, &mut out) };
    assert_eq!(status, SncsStatus::Ok);
    assert!((out.product - 1.5).abs() < 1e-12);
}

#[test]
fn spinor_moments_and_phase_limits() {
    let quarter = PI / 4.0;
    let mut out = SncsUncertainty::default();
    let status = unsafe {
        sncs_spinor_moments(SncsKind::Number, quarter, 0.0, 0.0, quarter, quarter, &mut out)
    };
    assert_eq!(status, SncsStatus::Ok);
    assert!((out.product * out.product - 2.25).abs() < 1e-8);

    let mut beta = 0.0;
    let status = unsafe {
        sncs_geometric_phase(
            SncsKind::Number,
            quarter,
            0.0,
            0.0,
            quarter,
            quarter,
            1.0,
            &mut beta,
        )
    };
    assert_eq!(status, SncsStatus::Ok);
    assert!((beta - 2.0 * PI).abs() < 1e-8);
}

#[test]
fn state_handle_round_trip() {
    let quarter = PI / 4.0;
    let mut handle: *mut SncsState = ptr::null_mut();
    let status = unsafe {
        sncs_state_new(
            SncsKind::ShiftedNumber,
            quarter,
            1.0,
            0.0,
            quarter,
            quarter,
            0,
            &mut handle,
        )
    };
    assert_eq!(status, SncsStatus::Ok);
    assert!(!handle.is_null());
    assert_eq!(unsafe { sncs_state_dim(handle) }, sncs_default_dim());

    // The handle is an eigenstate of its own operator.
    let mut residual = f64::INFINITY;
    let status = unsafe { sncs_state_eigen_residual(handle, &mut residual) };
    assert_eq!(status, SncsStatus::Ok);
    assert!(residual < 1e-8, "residual {residual:.3e}");

    // Matrix moments agree with the closed form.
    let mut via_matrix = SncsUncertainty::default();
    assert_eq!(
        unsafe { sncs_state_moments(handle, &mut via_matrix) },
        SncsStatus::Ok
    );
    let mut closed = SncsUncertainty::default();
    assert_eq!(
        unsafe {
            sncs_spinor_moments(
                SncsKind::ShiftedNumber,
                quarter,
                1.0,
                0.0,
                quarter,
                quarter,
                &mut closed,
            )
        },
        SncsStatus::Ok
    );
    assert!((via_matrix.product - closed.product).abs() < 1e-7);

    // Oracle phase agrees with the closed form too.
    let mut beta_matrix = 0.0;
    assert_eq!(
        unsafe { sncs_state_geometric_phase(handle, 1.0, &mut beta_matrix) },
        SncsStatus::Ok
    );
    let mut beta_closed = 0.0;
    assert_eq!(
        unsafe {
            sncs_geometric_phase(
                SncsKind::ShiftedNumber,
                quarter,
                1.0,
                0.0,
                quarter,
                quarter,
                1.0,
                &mut beta_closed,
            )
        },
        SncsStatus::Ok
    );
    assert!((beta_matrix - beta_closed).abs() < 1e-7);

    // Coefficient access bounds-checks.
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(
        unsafe { sncs_state_coeff(handle, 0, 0, &mut re, &mut im) },
        SncsStatus::Ok
    );
    assert_eq!(
        unsafe { sncs_state_coeff(handle, 2, 0, &mut re, &mut im) },
        SncsStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { sncs_state_coeff(handle, 0, 100_000, &mut re, &mut im) },
        SncsStatus::InvalidArgument
    );

    unsafe { sncs_state_free(handle) };
    unsafe { sncs_state_free(ptr::null_mut()) };
}

#[test]
fn truncation_error_surfaces_as_status() {
    let mut handle: *mut SncsState = ptr::null_mut();
    let status = unsafe {
        sncs_state_new(
            SncsKind::Linear,
            PI / 4.0,
            3.0,
            0.0,
            PI / 4.0,
            PI / 4.0,
            8,
            &mut handle,
        )
    };
    assert_eq!(status, SncsStatus::Truncation);
    assert!(handle.is_null());
}

#[test]
fn status_messages_are_static_c_strings() {
    for status in [SncsStatus::Ok, SncsStatus::Truncation, SncsStatus::Internal] {
        let ptr = sncs_status_message(status);
        assert!(!ptr.is_null());
        let s = unsafe { std::ffi::CStr::from_ptr(ptr) };
        assert!(!s.to_str().unwrap().is_empty());
    }
}
