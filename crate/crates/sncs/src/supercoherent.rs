//! Supercoherent states: spinor eigenstates of the (possibly deformed) SUSY
//! annihilation operator, for all three K-matrix families, together with
//! their superpositions and closed-form uncertainty products.
//!
//! Two independent construction paths exist on purpose. The recurrence path
//! forward-solves the eigenvalue equation level by level; the closed-form
//! path assembles deformed coherent states with the paper-trail G matrices.
//! They are cross-checked against each other and against the matrix oracle.

use crate::coherent::{
    bare_series, bare_series_derivative, build_state, cross_matrix_elements, CoherentLabel,
    UncertaintyReport,
};
use crate::fock::{DeformationKind, FockVector, SpinorState};
use crate::susy::{KFamily, KMatrix};
use crate::{C64, CVector, Error, Result};

/// Relative eigenvalue-gap threshold below which generic formulas are
/// abandoned for the degenerate construction (1/(kappa+ - kappa-) blows up).
pub const DEGENERATE_SWITCH: f64 = 1e-6;

/// Everything needed to name one supercoherent state: the K matrix, the
/// deformation, and the complex eigenvalue.
#[derive(Debug, Clone, Copy)]
pub struct SuperCoherentSpec {
    pub k: KMatrix,
    pub kind: DeformationKind,
    pub eigenvalue: C64,
}

impl SuperCoherentSpec {
    pub fn new(k: KMatrix, kind: DeformationKind, eigenvalue: C64) -> Self {
        Self {
            k,
            kind,
            eigenvalue,
        }
    }

    /// Scaled eigenvalues eigenvalue / kappa_pm labelling the component
    /// coherent states. Defined only for nonzero kappas.
    pub fn phis(&self) -> Result<(C64, C64)> {
        let kp = self.k.kappa_plus;
        let km = self.k.kappa_minus;
        if kp.norm() == 0.0 || km.norm() == 0.0 {
            return Err(Error::Domain(
                "phi_pm undefined: a kappa eigenvalue vanishes".into(),
            ));
        }
        Ok((self.eigenvalue / kp, self.eigenvalue / km))
    }

    /// phi = eigenvalue / (k1 + k4), the label used by the singular family.
    pub fn phi_singular(&self) -> Result<C64> {
        let trace = self.k.k1 + self.k.k4;
        if trace.norm() == 0.0 {
            return Err(Error::Domain(
                "phi undefined for singular family: k1 + k4 = 0".into(),
            ));
        }
        Ok(self.eigenvalue / trace)
    }
}

/// Superposition angles of cos(eta) |+> + exp(i lambda) sin(eta) |->.
#[derive(Debug, Clone, Copy)]
pub struct SuperpositionParams {
    pub eta: f64,
    pub lambda: f64,
}

impl SuperpositionParams {
    pub fn new(eta: f64, lambda: f64) -> Self {
        Self { eta, lambda }
    }

    /// eta = lambda = pi/4, the paper-figure preset.
    pub fn quarter() -> Self {
        Self::new(std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4)
    }

    fn weights(&self) -> (C64, C64) {
        (
            C64::new(self.eta.cos(), 0.0),
            C64::from_polar(self.eta.sin(), self.lambda),
        )
    }
}

/// The gamma coefficients of the superposition written over the component
/// coherent states: upper = g1p |phi+> + g1m |phi->, lower = eigenvalue *
/// (g2p |phi+> + g2m |phi->).
#[derive(Debug, Clone, Copy)]
pub struct Gammas {
    pub g1_plus: C64,
    pub g1_minus: C64,
    pub g2_plus: C64,
    pub g2_minus: C64,
}

impl Gammas {
    pub fn new(spec: &SuperCoherentSpec, params: &SuperpositionParams) -> Self {
        let (wp, wm) = params.weights();
        Self {
            g1_plus: spec.k.k2 * spec.k.kappa_plus * wp,
            g1_minus: spec.k.k2 * spec.k.kappa_minus * wm,
            g2_plus: (spec.k.kappa_plus - spec.k.k1) * wp,
            g2_minus: (spec.k.kappa_minus - spec.k.k1) * wm,
        }
    }
}

/// Norm bookkeeping of an (unnormalized) superposition: the branch weights
/// and the total norm^2.
#[derive(Debug, Clone, Copy)]
pub struct MomentWeights {
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub gamma_cross: C64,
    pub delta: f64,
}

impl MomentWeights {
    pub fn new(spec: &SuperCoherentSpec, params: &SuperpositionParams) -> Result<Self> {
        let g = Gammas::new(spec, params);
        let y2 = spec.eigenvalue.norm_sqr();
        let gamma_plus = g.g1_plus.norm_sqr() + g.g2_plus.norm_sqr() * y2;
        let gamma_minus = g.g1_minus.norm_sqr() + g.g2_minus.norm_sqr() * y2;
        let gamma_cross = g.g1_plus.conj() * g.g1_minus + g.g2_plus.conj() * g.g2_minus * y2;
        let (phi_p, phi_m) = spec.phis()?;
        let overlap = cross_matrix_elements(spec.kind, phi_p, phi_m)?.overlap;
        let delta = gamma_plus + gamma_minus + 2.0 * (gamma_cross * overlap).re;
        Ok(Self {
            gamma_plus,
            gamma_minus,
            gamma_cross,
            delta,
        })
    }
}

fn require_family(k: &KMatrix, expected: KFamily) -> Result<()> {
    if k.family != expected {
        return Err(Error::WrongFamily {
            expected: expected.label(),
            got: k.family.label(),
        });
    }
    Ok(())
}

/// Matrix element of the deformed lowering operator connecting |m> to |m-1>:
/// sqrt(m) f(m-1).
fn ladder_amp(kind: DeformationKind, m: usize) -> f64 {
    (m as f64).sqrt() * kind.f((m - 1) as u64)
}

/// Forward-solve the eigenvalue equation of the deformed SAO.
///
/// The free parameters are the leading coefficients of the solution space:
/// (s0, t1) for the linear and shifted-number kinds, (u1, v2) for the number
/// kind (whose u0 and v1 vanish identically). Needs an invertible K, so the
/// singular family is rejected.
pub fn recurrence_solve(
    spec: &SuperCoherentSpec,
    free: (C64, C64),
    n_terms: usize,
) -> Result<SpinorState> {
    if spec.k.family == KFamily::Singular {
        return Err(Error::WrongFamily {
            expected: "generic or degenerate",
            got: "singular",
        });
    }
    if n_terms < 3 {
        return Err(Error::Domain("n_terms must be >= 3".into()));
    }
    let k = &spec.k;
    if k.k1.norm() == 0.0 {
        return Err(Error::Domain(
            "recurrence parameterization needs k1 != 0".into(),
        ));
    }
    let det = k.k1 * k.k4 - k.k2 * k.k3;
    let y = spec.eigenvalue;
    let dim = n_terms;

    // upper[n] = s_n, lower[m] = t_{m+1}.
    let mut upper = CVector::zeros(dim);
    let mut lower = CVector::zeros(dim);

    // s and t live on the same index grid; t_n is stored while building.
    let mut s = vec![C64::new(0.0, 0.0); dim + 1];
    let mut t = vec![C64::new(0.0, 0.0); dim + 1];

    let start = match spec.kind {
        DeformationKind::Number => {
            // u0 = 0, v1 = 0; u1 and v2 are free; the n = 1 row fixes u2.
            s[0] = C64::new(0.0, 0.0);
            t[1] = C64::new(0.0, 0.0);
            s[1] = free.0;
            t[2] = free.1;
            s[2] = (y * s[1] - k.k2 * t[2]) / (k.k1 * ladder_amp(spec.kind, 2));
            2
        }
        _ => {
            // s0 and t1 are free; the n = 0 row fixes s1.
            s[0] = free.0;
            t[1] = free.1;
            s[1] = (y * s[0] - k.k2 * t[1]) / (k.k1 * ladder_amp(spec.kind, 1));
            1
        }
    };

    // Forward 2x2 solves:
    //   k1 L(n+1) s_{n+1} + k2 t_{n+1}        = Y s_n
    //   k3 L(n+1) L(n) s_{n+1} + k4 L(n) t_{n+1} = Y t_n
    for n in start..dim {
        let l_n = ladder_amp(spec.kind, n);
        let l_n1 = ladder_amp(spec.kind, n + 1);
        let rhs_s = y * s[n];
        let rhs_t = y * t[n];
        s[n + 1] = (rhs_s * k.k4 * l_n - k.k2 * rhs_t) / (det * l_n1 * l_n);
        t[n + 1] = (k.k1 * rhs_t - k.k3 * l_n * rhs_s) / (det * l_n);
    }

    for n in 0..dim {
        upper[n] = s[n];
        lower[n] = t[n + 1];
    }
    SpinorState::new(FockVector::new(upper), FockVector::new(lower))
}

/// The pair of generic-family supercoherent states
/// ( k2 kappa_pm |phi_pm>, (kappa_pm - k1) eigenvalue |phi_pm> ),
/// with normalized component coherent states; returned unnormalized overall.
pub fn build_generic(spec: &SuperCoherentSpec, dim: usize) -> Result<(SpinorState, SpinorState)> {
    require_family(&spec.k, KFamily::Generic)?;
    let (phi_p, phi_m) = spec.phis()?;
    let one_of = |kappa: C64, phi: C64| -> Result<SpinorState> {
        let state = build_state(CoherentLabel::new(spec.kind, phi), dim)?;
        let upper = state.scaled(spec.k.k2 * kappa);
        let lower = state.scaled((kappa - spec.k.k1) * spec.eigenvalue);
        SpinorState::new(upper, lower)
    };
    Ok((
        one_of(spec.k.kappa_plus, phi_p)?,
        one_of(spec.k.kappa_minus, phi_m)?,
    ))
}

/// 2x2 matrix of complex prefactors applied to a pair of Fock vectors:
/// upper = m11 a + m12 b, lower = m21 a + m22 b.
fn assemble(m: [[C64; 2]; 2], a: &FockVector, b: &FockVector) -> Result<SpinorState> {
    let upper = a.scaled(m[0][0]).add(&b.scaled(m[0][1]));
    let lower = a.scaled(m[1][0]).add(&b.scaled(m[1][1]));
    SpinorState::new(upper, lower)
}

/// The A/C basis of the generic family, combined with the primed free
/// parameters: s0' |A> + t1' |C>.
///
/// Built over bare coherent series, so it agrees coefficient-for-coefficient
/// with [`recurrence_solve`] at s0' = s0 / k1, t1' = t1 / (eigenvalue k1).
pub fn build_a_c_basis(
    spec: &SuperCoherentSpec,
    s0_primed: C64,
    t1_primed: C64,
    dim: usize,
) -> Result<SpinorState> {
    require_family(&spec.k, KFamily::Generic)?;
    let k = &spec.k;
    let (kp, km) = (k.kappa_plus, k.kappa_minus);
    let y = spec.eigenvalue;
    let (phi_p, phi_m) = spec.phis()?;
    let sp = bare_series(spec.kind, phi_p, dim)?;
    let sm = bare_series(spec.kind, phi_m, dim)?;
    let gap = kp - km;
    let inv_gap = C64::new(1.0, 0.0) / gap;

    let g_a = [
        [kp * (kp - k.k4) * inv_gap, -km * (km - k.k4) * inv_gap],
        [k.k3 * y * inv_gap, -k.k3 * y * inv_gap],
    ];
    let c_lower = |kappa: C64| y * (k.k1 * kappa - (k.k1 * k.k1 + k.k2 * k.k3));
    let g_c = [
        [k.k2 * kp * km * inv_gap, -k.k2 * kp * km * inv_gap],
        [c_lower(kp) * inv_gap, -c_lower(km) * inv_gap],
    ];

    let a_state = assemble(g_a, &sp, &sm)?;
    let c_state = assemble(g_c, &sp, &sm)?;
    a_state.scaled(s0_primed).add(&c_state.scaled(t1_primed))
}

/// Degenerate-family construction from |phi> and its term-wise derivative
/// state, combined as s0' |A^d> + t1' |C^d>.
pub fn build_degenerate(
    spec: &SuperCoherentSpec,
    s0_primed: C64,
    t1_primed: C64,
    dim: usize,
) -> Result<SpinorState> {
    require_family(&spec.k, KFamily::Degenerate)?;
    let k = &spec.k;
    let kappa = k.kappa();
    let phi = spec.eigenvalue / kappa;
    let series = bare_series(spec.kind, phi, dim)?;
    let deriv = bare_series_derivative(spec.kind, phi, dim)?;

    let zero = C64::new(0.0, 0.0);
    let g_a = [
        [k.k1, -(kappa - k.k4) * phi],
        [zero, -k.k3 * phi * phi],
    ];
    let g_c = [
        [zero, -kappa * k.k2 * phi],
        [
            kappa * k.k1 * phi,
            -kappa * (k.k4 - k.k1) * 0.5 * phi * phi,
        ],
    ];

    let a_state = assemble(g_a, &series, &deriv)?;
    let c_state = assemble(g_c, &series, &deriv)?;
    a_state.scaled(s0_primed).add(&c_state.scaled(t1_primed))
}

/// Singular-family state ( k1 |phi>, k3 phi |phi> ) with
/// phi = eigenvalue / (k1 + k4).
pub fn build_singular(spec: &SuperCoherentSpec, dim: usize) -> Result<SpinorState> {
    require_family(&spec.k, KFamily::Singular)?;
    let phi = spec.phi_singular()?;
    let state = build_state(CoherentLabel::new(spec.kind, phi), dim)?;
    SpinorState::new(
        state.scaled(spec.k.k1),
        state.scaled(spec.k.k3 * phi),
    )
}

/// cos(eta) |plus> + exp(i lambda) sin(eta) |minus>.
pub fn superpose(
    pair: (&SpinorState, &SpinorState),
    params: &SuperpositionParams,
) -> Result<SpinorState> {
    let (wp, wm) = params.weights();
    pair.0.scaled(wp).add(&pair.1.scaled(wm))
}

/// Free parameters reproducing the limit of the generic superposition as the
/// eigenvalue gap closes, expressed in the degenerate A/C basis.
///
/// Away from k2 = 0 the limit direction is (kappa k2, (k4 - k1)/2); when
/// both entries vanish (k2 = 0 forces k1 = k4 on the degenerate stratum)
/// the first nonvanishing order is the pure C direction.
pub fn degenerate_superposition_limit(k: &KMatrix) -> (C64, C64) {
    let s0 = k.kappa() * k.k2;
    let t1 = (k.k4 - k.k1) * 0.5;
    if s0.norm() + t1.norm() < 1e-12 * (k.kappa().norm() + 1.0) {
        (C64::new(0.0, 0.0), C64::new(1.0, 0.0))
    } else {
        (s0, t1)
    }
}

/// Build the normalized superposition state for any family, routing through
/// the construction the K matrix calls for.
///
/// Near the degenerate boundary (relative gap below [`DEGENERATE_SWITCH`])
/// the generic formulas cancel catastrophically, so the degenerate limit
/// construction is used instead. The singular family has no +/- pair to
/// superpose and is rejected.
pub fn build_superposition(
    spec: &SuperCoherentSpec,
    params: &SuperpositionParams,
    dim: usize,
) -> Result<SpinorState> {
    let k = &spec.k;
    let gap = (k.kappa_plus - k.kappa_minus).norm();
    let near_degenerate = gap < DEGENERATE_SWITCH * (k.kappa_plus.norm() + k.kappa_minus.norm());
    match k.family {
        KFamily::Singular => Err(Error::WrongFamily {
            expected: "generic or degenerate",
            got: "singular",
        }),
        KFamily::Degenerate => {
            let (s0, t1) = degenerate_superposition_limit(k);
            build_degenerate(spec, s0, t1, dim)?.normalized()
        }
        KFamily::Generic if near_degenerate => {
            let (s0, t1) = degenerate_superposition_limit(k);
            // Treat as degenerate: reclassify with a tolerance wide enough to
            // absorb the gap.
            let widened = crate::susy::classify(
                k.k1,
                k.k2,
                k.k3,
                k.k4,
                (gap / (k.kappa_plus.norm() + k.kappa_minus.norm())).max(1e-15) * 4.0,
            )?;
            let spec = SuperCoherentSpec::new(widened, spec.kind, spec.eigenvalue);
            build_degenerate(&spec, s0, t1, dim)?.normalized()
        }
        KFamily::Generic => {
            let (plus, minus) = build_generic(spec, dim)?;
            superpose((&plus, &minus), params)?.normalized()
        }
    }
}

/// The A- and C-direction eigenstates, rescaled so both stay nonzero for
/// every eigenvalue (the raw C state carries an overall eigenvalue factor
/// that would vanish at 0). Covers the generic and degenerate families.
pub fn ac_direction_states(
    spec: &SuperCoherentSpec,
    dim: usize,
) -> Result<(SpinorState, SpinorState)> {
    let k = &spec.k;
    let y = spec.eigenvalue;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    match k.family {
        KFamily::Generic => {
            let a = build_a_c_basis(spec, one, zero, dim)?;
            let c = if y.norm() == 0.0 {
                // lim C / eigenvalue = ( -k2 S'(0), k1 S(0) ).
                let series0 = bare_series(spec.kind, zero, dim)?;
                let deriv0 = bare_series_derivative(spec.kind, zero, dim)?;
                SpinorState::new(deriv0.scaled(-k.k2), series0.scaled(k.k1))?
            } else {
                build_a_c_basis(spec, zero, one / y, dim)?
            };
            Ok((a, c))
        }
        KFamily::Degenerate => {
            let kappa = k.kappa();
            let phi = y / kappa;
            let series = bare_series(spec.kind, phi, dim)?;
            let deriv = bare_series_derivative(spec.kind, phi, dim)?;
            let g_a = [
                [k.k1, -(kappa - k.k4) * phi],
                [zero, -k.k3 * phi * phi],
            ];
            // G_C^d stripped of its overall kappa phi factor.
            let g_c = [
                [zero, -k.k2],
                [k.k1, -(k.k4 - k.k1) * 0.5 * phi],
            ];
            Ok((
                assemble(g_a, &series, &deriv)?,
                assemble(g_c, &series, &deriv)?,
            ))
        }
        KFamily::Singular => Err(Error::WrongFamily {
            expected: "generic or degenerate",
            got: "singular",
        }),
    }
}

/// cos(eta) A + exp(i lambda) sin(eta) C over the unit-normalized A/C
/// direction states: the fixed-free-parameter eigenstate family used for
/// the linear-case figure comparison.
///
/// Unlike the +/- pair superposition (which turns into an ever-growing cat
/// state), members of this family relax to a single coherent branch at
/// large eigenvalue when the kappas are real, so their uncertainty product
/// peaks at finite |eigenvalue| and then decays; for complex kappas the two
/// branches keep equal weight and the product grows.
pub fn build_ac_superposition(
    spec: &SuperCoherentSpec,
    params: &SuperpositionParams,
    dim: usize,
) -> Result<SpinorState> {
    let (a, c) = ac_direction_states(spec, dim)?;
    let (wp, wm) = params.weights();
    a.normalized()?
        .scaled(wp)
        .add(&c.normalized()?.scaled(wm))
}

/// Closed-form quadrature uncertainties of the generic-family superposition,
/// assembled from the branch weights and the per-family cross elements.
pub fn closed_form_spinor_moments(
    spec: &SuperCoherentSpec,
    params: &SuperpositionParams,
) -> Result<UncertaintyReport> {
    require_family(&spec.k, KFamily::Generic)?;
    let (phi_p, phi_m) = spec.phis()?;
    let w = MomentWeights::new(spec, params)?;
    if w.delta <= 0.0 || !w.delta.is_finite() {
        return Err(Error::ZeroNorm);
    }
    let pp = cross_matrix_elements(spec.kind, phi_p, phi_p)?;
    let mm = cross_matrix_elements(spec.kind, phi_m, phi_m)?;
    let pm = cross_matrix_elements(spec.kind, phi_p, phi_m)?;

    let combine = |d_pp: C64, d_mm: C64, d_pm: C64| -> f64 {
        (w.gamma_plus * d_pp.re
            + w.gamma_minus * d_mm.re
            + 2.0 * (w.gamma_cross * d_pm).re)
            / w.delta
    };

    let mean_x = combine(pp.x, mm.x, pm.x);
    let mean_p = combine(pp.p, mm.p, pm.p);
    let mean_x2 = combine(pp.x2, mm.x2, pm.x2);
    let mean_p2 = combine(pp.p2, mm.p2, pm.p2);
    Ok(UncertaintyReport::from_moments(
        mean_x, mean_p, mean_x2, mean_p2,
    ))
}
