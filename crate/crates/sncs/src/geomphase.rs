//! Evolution loop of the SUSY oscillator and geometric phases of its
//! supercoherent states.
//!
//! The spectrum is integer multiples of omega, so the propagator returns to
//! the identity after tau = 2 pi / omega and every state is cyclic. For a
//! cyclic state under a constant Hamiltonian the geometric phase is
//! beta = Omega + tau <H>, with Omega = 0 here.

use std::f64::consts::PI;

use crate::coherent::{cross_matrix_elements, cross_number_element};
use crate::fock::SpinorState;
use crate::supercoherent::{Gammas, MomentWeights, SuperCoherentSpec, SuperpositionParams};
use crate::susy::{susy_hamiltonian, KFamily};
use crate::{C64, Error, Result};

/// A geometric phase together with its bookkeeping: beta = total_phase +
/// period * mean_energy. Reported unwrapped (not reduced mod 2 pi).
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct GeometricPhaseResult {
    pub beta: f64,
    /// The loop's total phase Omega; identically 0 for this system.
    pub total_phase: f64,
    /// Loop period 2 pi / omega.
    pub period: f64,
    pub mean_energy: f64,
}

impl GeometricPhaseResult {
    fn from_energy(omega: f64, mean_energy: f64) -> Self {
        let period = 2.0 * PI / omega;
        Self {
            beta: period * mean_energy,
            total_phase: 0.0,
            period,
            mean_energy,
        }
    }
}

/// Max-entry norm of exp(-i H tau) - I for the truncated SUSY Hamiltonian.
///
/// H is diagonal by construction, so the exponential is taken entry-wise.
pub fn propagator_residual(omega: f64, dim: usize, tau: f64) -> Result<f64> {
    let h = susy_hamiltonian(omega, dim)?;
    let mut max = 0.0f64;
    for i in 0..2 * dim {
        let phase = (-C64::new(0.0, 1.0) * h[(i, i)] * tau).exp();
        max = max.max((phase - 1.0).norm());
    }
    Ok(max)
}

/// Residual of the evolution loop at its period tau = 2 pi / omega; zero up
/// to rounding because the spectrum is n omega.
pub fn evolution_loop_check(omega: f64, dim: usize) -> Result<f64> {
    propagator_residual(omega, dim, 2.0 * PI / omega)
}

/// Geometric phase of an explicit spinor state, via the matrix expectation
/// of the Hamiltonian: beta = (2 pi / omega) <H>.
pub fn geometric_phase_oracle(state: &SpinorState, omega: f64) -> Result<GeometricPhaseResult> {
    if state.joint_norm_sq() == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let h = susy_hamiltonian(omega, state.dim())?;
    let mean_energy = state.expectation_block(&h)?.re;
    Ok(GeometricPhaseResult::from_energy(omega, mean_energy))
}

/// Closed-form mean of N over the superposition written in gamma
/// coefficients; the +1 energy offset of the lower spinor component gives
/// the trailing gamma-2 block.
pub fn mean_number_from_gammas(
    spec: &SuperCoherentSpec,
    gammas: &Gammas,
    weights: &MomentWeights,
) -> Result<f64> {
    let (phi_p, phi_m) = spec.phis()?;
    let kind = spec.kind;
    let n_pp = cross_number_element(kind, phi_p, phi_p)?;
    let n_mm = cross_number_element(kind, phi_m, phi_m)?;
    let n_pm = cross_number_element(kind, phi_p, phi_m)?;
    let overlap_pm = cross_matrix_elements(kind, phi_p, phi_m)?.overlap;
    let y2 = spec.eigenvalue.norm_sqr();

    let numerator = weights.gamma_plus * n_pp.re
        + weights.gamma_minus * n_mm.re
        + 2.0 * (weights.gamma_cross * n_pm).re
        + y2 * (gammas.g2_plus.norm_sqr()
            + gammas.g2_minus.norm_sqr()
            + 2.0 * (gammas.g2_plus.conj() * gammas.g2_minus * overlap_pm).re);
    if weights.delta <= 0.0 || !weights.delta.is_finite() {
        return Err(Error::ZeroNorm);
    }
    Ok(numerator / weights.delta)
}

/// Closed-form geometric phase of the generic-family superposition, for
/// either deformation (the 0F2 structure is picked by the spec's kind).
///
/// beta is independent of omega: the period 2 pi / omega cancels the omega
/// in <H>.
pub fn closed_form_beta(
    spec: &SuperCoherentSpec,
    params: &SuperpositionParams,
    omega: f64,
) -> Result<GeometricPhaseResult> {
    if spec.k.family != KFamily::Generic {
        return Err(Error::WrongFamily {
            expected: "generic",
            got: spec.k.family.label(),
        });
    }
    if omega.is_nan() || omega <= 0.0 {
        return Err(Error::Domain(format!("omega must be > 0, got {omega}")));
    }
    let gammas = Gammas::new(spec, params);
    let weights = MomentWeights::new(spec, params)?;
    let mean_number = mean_number_from_gammas(spec, &gammas, &weights)?;
    Ok(GeometricPhaseResult::from_energy(omega, omega * mean_number))
}
