//! Standard and nonlinear coherent states: closed-form construction,
//! quadrature moments and uncertainty products.
//!
//! Coefficients are always generated by multiplicative recurrence, never from
//! Gamma-function calls, and every normalizer is cross-checked against the
//! independently summed 0F2 (or exp) closed form.

use crate::fock::{quadrature_matrices, DeformationKind, FockVector, SpinorState};
use crate::hypergeom::{f02, f02_real};
use crate::{C64, Error, Result};

/// Largest tail norm^2 fraction a truncated construction may drop.
pub const TAIL_LIMIT: f64 = 1e-12;

/// A coherent-state label: complex amplitude plus deformation family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentLabel {
    pub amplitude: C64,
    pub family: DeformationKind,
}

impl CoherentLabel {
    pub fn new(family: DeformationKind, amplitude: C64) -> Self {
        Self { amplitude, family }
    }
}

/// Quadrature means, variances and the Heisenberg product, in
/// hbar = m = omega = 1 units.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct UncertaintyReport {
    pub mean_x: f64,
    pub mean_p: f64,
    pub mean_x2: f64,
    pub mean_p2: f64,
    pub var_x: f64,
    pub var_p: f64,
    /// sqrt(var_x * var_p).
    pub product: f64,
}

impl UncertaintyReport {
    /// Assemble a report from raw moments and (separately computed) variances.
    ///
    /// Positivity of the variances is analytically guaranteed; anything
    /// negative beyond rounding is loudly clamped.
    pub fn new(
        mean_x: f64,
        mean_p: f64,
        mean_x2: f64,
        mean_p2: f64,
        var_x: f64,
        var_p: f64,
    ) -> Self {
        let var_x = clamp_variance(var_x, "var_x");
        let var_p = clamp_variance(var_p, "var_p");
        Self {
            mean_x,
            mean_p,
            mean_x2,
            mean_p2,
            var_x,
            var_p,
            product: (var_x * var_p).sqrt(),
        }
    }

    pub fn from_moments(mean_x: f64, mean_p: f64, mean_x2: f64, mean_p2: f64) -> Self {
        Self::new(
            mean_x,
            mean_p,
            mean_x2,
            mean_p2,
            mean_x2 - mean_x * mean_x,
            mean_p2 - mean_p * mean_p,
        )
    }
}

fn clamp_variance(v: f64, name: &str) -> f64 {
    if v < 0.0 {
        if v < -1e-10 {
            eprintln!("warning: clamping {name} = {v:.3e} to 0");
        }
        0.0
    } else {
        v
    }
}

/// The 0F2 ratio combinations entering the deformed-family moments.
#[derive(Debug, Clone, Copy)]
pub struct AuxMoments {
    pub beta: f64,
    pub sigma: f64,
    pub tau: f64,
    pub rho: f64,
}

impl AuxMoments {
    /// Evaluate all four auxiliary functions at radius r >= 0.
    pub fn at(r: f64) -> Result<Self> {
        let x = r * r;
        let f11 = f02_real(1.0, 1.0, x)?;
        let f12 = f02_real(1.0, 2.0, x)?;
        let f13 = f02_real(1.0, 3.0, x)?;
        let f22 = f02_real(2.0, 2.0, x)?;
        let f23 = f02_real(2.0, 3.0, x)?;
        let beta = f22 / f11 + 0.5 * f13 / f11;
        let sigma = f22 / f11 - 0.5 * f13 / f11;
        let tau = 2.0 * (f12 / f11).powi(2) - beta;
        let rho = 2.0 * (f22 / f12).powi(2) - f23 / f12;
        Ok(Self {
            beta,
            sigma,
            tau,
            rho,
        })
    }
}

/// Fock index of the first nonzero coefficient for a family.
pub fn support_offset(family: DeformationKind) -> usize {
    match family {
        DeformationKind::Number => 1,
        _ => 0,
    }
}

/// Closed-form norm^2 of the bare coefficient series.
fn bare_norm_sq(family: DeformationKind, r_sq: f64) -> Result<f64> {
    match family {
        DeformationKind::Linear => Ok(r_sq.exp()),
        DeformationKind::ShiftedNumber => f02_real(1.0, 1.0, r_sq),
        DeformationKind::Number => f02_real(1.0, 2.0, r_sq),
    }
}

/// c_{n+1} / c_n of the bare series, as a function of the series index n.
fn series_ratio(family: DeformationKind, alpha: C64, n: usize) -> C64 {
    let nf = n as f64;
    match family {
        DeformationKind::Linear => alpha / (nf + 1.0).sqrt(),
        DeformationKind::ShiftedNumber => alpha / ((nf + 1.0) * (nf + 1.0).sqrt()),
        DeformationKind::Number => alpha / ((nf + 1.0) * (nf + 2.0).sqrt()),
    }
}

const TAIL_CAP: usize = 1_000_000;

/// Run `ratio` past the kept terms and add up what truncation drops.
fn tail_norm_sq(
    mut term: C64,
    mut n: usize,
    dim: usize,
    head_norm_sq: f64,
    mut ratio: impl FnMut(usize, C64) -> Result<C64>,
) -> Result<f64> {
    let mut tail = 0.0;
    loop {
        let t = term.norm_sqr();
        if !t.is_finite() {
            return Err(Error::Domain(
                "coefficient series overflows at this amplitude".into(),
            ));
        }
        if t < 1e-4 * f64::EPSILON * TAIL_LIMIT * (head_norm_sq + tail).max(f64::MIN_POSITIVE)
            && n > 2 * dim
        {
            return Ok(tail);
        }
        tail += t;
        term = ratio(n, term)?;
        n += 1;
        if n > TAIL_CAP {
            return Err(Error::Convergence {
                terms: TAIL_CAP,
                magnitude: term.norm(),
            });
        }
    }
}

fn check_tail(dim: usize, head: f64, tail: f64) -> Result<()> {
    let total = head + tail;
    if total > 0.0 && tail >= TAIL_LIMIT * total {
        return Err(Error::Truncation {
            dim,
            tail: tail / total,
            limit: TAIL_LIMIT,
        });
    }
    Ok(())
}

/// Bare (unnormalized, leading coefficient 1) coefficient vector of length
/// `dim`, with the family's support offset applied. Errors if the dropped
/// tail would carry more than [`TAIL_LIMIT`] of the norm^2.
pub(crate) fn bare_series(family: DeformationKind, alpha: C64, dim: usize) -> Result<FockVector> {
    if dim < 2 {
        return Err(Error::Domain(format!("dim must be >= 2, got {dim}")));
    }
    if !alpha.is_finite() {
        return Err(Error::Domain("amplitude is not finite".into()));
    }
    let offset = support_offset(family);
    let mut v = crate::CVector::zeros(dim);
    let mut c = C64::new(1.0, 0.0);
    let mut head = 0.0;
    let mut n = 0usize;
    while offset + n < dim {
        v[offset + n] = c;
        head += c.norm_sqr();
        c *= series_ratio(family, alpha, n);
        n += 1;
    }
    let tail = tail_norm_sq(c, n, dim, head, |k, t| Ok(t * series_ratio(family, alpha, k)))?;
    check_tail(dim, head, tail)?;
    Ok(FockVector::new(v))
}

/// Term-wise d/dalpha of the bare series, in the same scale convention as
/// [`bare_series`]. Well-defined at alpha = 0 (it is then the single term at
/// series index 1).
pub(crate) fn bare_series_derivative(
    family: DeformationKind,
    alpha: C64,
    dim: usize,
) -> Result<FockVector> {
    if dim < 2 {
        return Err(Error::Domain(format!("dim must be >= 2, got {dim}")));
    }
    let offset = support_offset(family);
    let mut v = crate::CVector::zeros(dim);
    // d_n = n alpha^(n-1) / denom_n, with its own recurrence:
    // d_{n+1} = d_n * ratio(n) * (n+1)/n, seeded by d_1 = 1/denom_1.
    let mut d = series_ratio(family, C64::new(1.0, 0.0), 0);
    let mut head = 0.0;
    let mut n = 1usize;
    let step = |k: usize, t: C64| -> Result<C64> {
        let kf = k as f64;
        Ok(t * series_ratio(family, alpha, k) * ((kf + 1.0) / kf))
    };
    while offset + n < dim {
        v[offset + n] = d;
        head += d.norm_sqr();
        d = step(n, d)?;
        n += 1;
    }
    let tail = tail_norm_sq(d, n, dim, head, step)?;
    check_tail(dim, head, tail)?;
    Ok(FockVector::new(v))
}

/// Normalized coherent state of the requested family.
pub fn build_state(label: CoherentLabel, dim: usize) -> Result<FockVector> {
    let bare = bare_series(label.family, label.amplitude, dim)?;
    let numeric = bare.norm_sq();
    let closed = bare_norm_sq(label.family, label.amplitude.norm_sqr())?;
    // Double-entry bookkeeping: recurrence vs independently summed normalizer.
    assert!(
        (numeric - closed).abs() <= 1e-10 * closed,
        "normalizer mismatch for {:?}: series {numeric:.17e} vs closed form {closed:.17e}",
        label.family
    );
    bare.normalized()
}

/// Normalized eigenstate of f(N) a for an arbitrary deformation profile.
///
/// Accepts either f with no zeros on n >= 0, or f(0) = 0 with no further
/// zeros; any other zero pattern has no coherent state of this form.
pub fn build_general_nlcs<F>(f: F, alpha: C64, dim: usize) -> Result<FockVector>
where
    F: Fn(u64) -> f64,
{
    if dim < 2 {
        return Err(Error::Domain(format!("dim must be >= 2, got {dim}")));
    }
    if !alpha.is_finite() {
        return Err(Error::Domain("amplitude is not finite".into()));
    }
    let offset = if f(0) == 0.0 { 1 } else { 0 };
    // Series term n lives at Fock level n + offset, and the step into term
    // n+1 divides by sqrt(level + 1) * f(level); f(level) = 0 anywhere past
    // the start is an unsupported zero pattern.
    let step = |n: usize, t: C64| -> Result<C64> {
        let level = (n + offset) as f64;
        let fv = f((n + offset) as u64);
        if fv == 0.0 {
            return Err(Error::Domain(format!(
                "unsupported zero pattern: f({}) = 0",
                n + offset
            )));
        }
        Ok(t * alpha / ((level + 1.0).sqrt() * fv))
    };
    let mut v = crate::CVector::zeros(dim);
    let mut c = C64::new(1.0, 0.0);
    let mut head = 0.0;
    let mut n = 0usize;
    while offset + n < dim {
        v[offset + n] = c;
        head += c.norm_sqr();
        c = step(n, c)?;
        n += 1;
    }
    let tail = tail_norm_sq(c, n, dim, head, step)?;
    check_tail(dim, head, tail)?;
    FockVector::new(v).normalized()
}

/// Closed-form quadrature moments of a single coherent state.
pub fn closed_form_moments(label: CoherentLabel) -> Result<UncertaintyReport> {
    let alpha = label.amplitude;
    if !alpha.is_finite() {
        return Err(Error::Domain("amplitude is not finite".into()));
    }
    let (re, im) = (alpha.re, alpha.im);
    let sqrt2 = 2.0_f64.sqrt();
    match label.family {
        DeformationKind::Linear => {
            let mean_x = sqrt2 * re;
            let mean_p = sqrt2 * im;
            let mean_x2 = 0.5 + 2.0 * re * re;
            let mean_p2 = 0.5 + 2.0 * im * im;
            Ok(UncertaintyReport::new(
                mean_x, mean_p, mean_x2, mean_p2, 0.5, 0.5,
            ))
        }
        DeformationKind::ShiftedNumber => {
            let r = alpha.norm();
            let x = r * r;
            let aux = AuxMoments::at(r)?;
            let ratio12 = f02_real(1.0, 2.0, x)? / f02_real(1.0, 1.0, x)?;
            let mean_x = sqrt2 * re * ratio12;
            let mean_p = sqrt2 * im * ratio12;
            let mean_x2 = 0.5 + re * re * aux.beta + im * im * aux.sigma;
            let mean_p2 = 0.5 + re * re * aux.sigma + im * im * aux.beta;
            let var_x = 0.5 - re * re * aux.tau + im * im * aux.sigma;
            let var_p = 0.5 - im * im * aux.tau + re * re * aux.sigma;
            Ok(UncertaintyReport::new(
                mean_x, mean_p, mean_x2, mean_p2, var_x, var_p,
            ))
        }
        DeformationKind::Number => {
            let r = alpha.norm();
            let x = r * r;
            let aux = AuxMoments::at(r)?;
            let f12 = f02_real(1.0, 2.0, x)?;
            let ratio22 = f02_real(2.0, 2.0, x)? / f12;
            let ratio23 = f02_real(2.0, 3.0, x)? / f12;
            let mean_x = sqrt2 * re * ratio22;
            let mean_p = sqrt2 * im * ratio22;
            let mean_x2 = 1.5 + re * re * ratio23;
            let mean_p2 = 1.5 + im * im * ratio23;
            let var_x = 1.5 - re * re * aux.rho;
            let var_p = 1.5 - im * im * aux.rho;
            Ok(UncertaintyReport::new(
                mean_x, mean_p, mean_x2, mean_p2, var_x, var_p,
            ))
        }
    }
}

/// The five normalized matrix elements <a1| . |a2> between two coherent
/// states of the same family.
#[derive(Debug, Clone, Copy)]
pub struct CrossElements {
    pub overlap: C64,
    pub x: C64,
    pub x2: C64,
    pub p: C64,
    pub p2: C64,
}

/// Closed-form cross matrix elements; the hypergeometric arguments are the
/// complex product conj(a1) * a2.
pub fn cross_matrix_elements(family: DeformationKind, a1: C64, a2: C64) -> Result<CrossElements> {
    if !a1.is_finite() || !a2.is_finite() {
        return Err(Error::Domain("amplitude is not finite".into()));
    }
    let w = a1.conj() * a2;
    let sqrt2 = 2.0_f64.sqrt();
    let plus = a2 + a1.conj();
    let minus = a2 - a1.conj();
    let i = C64::new(0.0, 1.0);
    match family {
        DeformationKind::Linear => {
            let o = (w - 0.5 * (a1.norm_sqr() + a2.norm_sqr())).exp();
            Ok(CrossElements {
                overlap: o,
                x: plus / sqrt2 * o,
                x2: (plus * plus + 1.0) * 0.5 * o,
                p: -i * minus / sqrt2 * o,
                p2: (C64::new(1.0, 0.0) - minus * minus) * 0.5 * o,
            })
        }
        DeformationKind::ShiftedNumber => {
            let norms =
                (f02_real(1.0, 1.0, a1.norm_sqr())? * f02_real(1.0, 1.0, a2.norm_sqr())?).sqrt();
            let f11 = f02(1.0, 1.0, w)?;
            let f12 = f02(1.0, 2.0, w)?;
            let f13 = f02(1.0, 3.0, w)?;
            let f22 = f02(2.0, 2.0, w)?;
            let squares = a2 * a2 + a1.conj() * a1.conj();
            Ok(CrossElements {
                overlap: f11 / norms,
                x: plus / sqrt2 * f12 / norms,
                x2: (squares * 0.5 * f13 + 2.0 * w * f22 + f11) / (2.0 * norms),
                p: -i * minus / sqrt2 * f12 / norms,
                p2: (-squares * 0.5 * f13 + 2.0 * w * f22 + f11) / (2.0 * norms),
            })
        }
        DeformationKind::Number => {
            let norms =
                (f02_real(1.0, 2.0, a1.norm_sqr())? * f02_real(1.0, 2.0, a2.norm_sqr())?).sqrt();
            let f12 = f02(1.0, 2.0, w)?;
            let f22 = f02(2.0, 2.0, w)?;
            let f23 = f02(2.0, 3.0, w)?;
            Ok(CrossElements {
                overlap: f12 / norms,
                x: plus / sqrt2 * f22 / norms,
                x2: (plus * plus * 0.5 * f23 + 3.0 * f12) / (2.0 * norms),
                p: -i * minus / sqrt2 * f22 / norms,
                p2: (-minus * minus * 0.5 * f23 + 3.0 * f12) / (2.0 * norms),
            })
        }
    }
}

/// Normalized <a1| N |a2>: the energy bookkeeping behind the geometric
/// phases.
pub fn cross_number_element(family: DeformationKind, a1: C64, a2: C64) -> Result<C64> {
    let w = a1.conj() * a2;
    match family {
        DeformationKind::Linear => {
            let o = (w - 0.5 * (a1.norm_sqr() + a2.norm_sqr())).exp();
            Ok(w * o)
        }
        DeformationKind::ShiftedNumber => {
            let norms =
                (f02_real(1.0, 1.0, a1.norm_sqr())? * f02_real(1.0, 1.0, a2.norm_sqr())?).sqrt();
            Ok(w * f02(2.0, 2.0, w)? / norms)
        }
        DeformationKind::Number => {
            let norms =
                (f02_real(1.0, 2.0, a1.norm_sqr())? * f02_real(1.0, 2.0, a2.norm_sqr())?).sqrt();
            Ok((w * 0.5 * f02(2.0, 3.0, w)? + f02(1.0, 2.0, w)?) / norms)
        }
    }
}

/// The four quadrature sandwich operators at a fixed truncation, so scans
/// can reuse them across rows.
pub struct QuadratureOps {
    x: crate::CMatrix,
    p: crate::CMatrix,
    x2: crate::CMatrix,
    p2: crate::CMatrix,
}

impl QuadratureOps {
    pub fn new(dim: usize) -> Result<Self> {
        let (x, p) = quadrature_matrices(dim)?;
        let x2 = &x * &x;
        let p2 = &p * &p;
        Ok(Self { x, p, x2, p2 })
    }

    pub fn moments(&self, state: &FockVector) -> Result<UncertaintyReport> {
        Ok(UncertaintyReport::from_moments(
            state.expectation(&self.x)?.re,
            state.expectation(&self.p)?.re,
            state.expectation(&self.x2)?.re,
            state.expectation(&self.p2)?.re,
        ))
    }

    pub fn spinor_moments(&self, state: &SpinorState) -> Result<UncertaintyReport> {
        Ok(UncertaintyReport::from_moments(
            state.expectation_scalar(&self.x)?.re,
            state.expectation_scalar(&self.p)?.re,
            state.expectation_scalar(&self.x2)?.re,
            state.expectation_scalar(&self.p2)?.re,
        ))
    }
}

/// Matrix-sandwich moments of an explicit Fock vector: the oracle side of
/// every closed-form/oracle comparison.
pub fn oracle_moments(state: &FockVector) -> Result<UncertaintyReport> {
    QuadratureOps::new(state.dim())?.moments(state)
}

/// Same for a spinor state; x and p act identically on both components.
pub fn oracle_spinor_moments(state: &SpinorState) -> Result<UncertaintyReport> {
    QuadratureOps::new(state.dim())?.spinor_moments(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{deformed_lowering, ladder_matrices, oracle_eigenstate};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn grid25() -> Vec<C64> {
        let mut pts = Vec::new();
        for i in 0..5 {
            for j in 0..5 {
                pts.push(c(-3.0 + 1.5 * i as f64, -3.0 + 1.5 * j as f64));
            }
        }
        pts
    }

    #[test]
    fn shifted_number_at_zero_is_ground_state() {
        let state = build_state(
            CoherentLabel::new(DeformationKind::ShiftedNumber, c(0.0, 0.0)),
            16,
        )
        .unwrap();
        let ground = FockVector::basis(16, 0);
        assert!((state.overlap(&ground).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn number_at_zero_is_first_excited_state() {
        let state =
            build_state(CoherentLabel::new(DeformationKind::Number, c(0.0, 0.0)), 16).unwrap();
        let one = FockVector::basis(16, 1);
        assert!((state.overlap(&one).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn number_family_never_touches_the_vacuum() {
        for alpha in [c(0.3, 0.0), c(1.0, -2.0), c(-2.5, 1.5)] {
            let state =
                build_state(CoherentLabel::new(DeformationKind::Number, alpha), 64).unwrap();
            assert_eq!(state.coeff(0), c(0.0, 0.0));
        }
    }

    #[test]
    fn linear_state_matches_explicit_coefficients_and_oracle() {
        let dim = 64;
        let alpha = c(1.0, 0.0);
        let state = build_state(CoherentLabel::new(DeformationKind::Linear, alpha), dim).unwrap();
        // Explicit coefficients e^{-1/2} / sqrt(n!).
        let mut coeff = (-0.5f64).exp();
        for n in 0..10 {
            assert!(
                (state.coeff(n) - c(coeff, 0.0)).norm() < 1e-14,
                "coefficient {n}"
            );
            coeff /= ((n + 1) as f64).sqrt();
        }
        let (lowering, _, _) = ladder_matrices(dim).unwrap();
        let oracle = oracle_eigenstate(&lowering, alpha, 0, 1e-8).unwrap();
        assert!(oracle.residual < 1e-10);
        let oracle_state = FockVector::new(oracle.vector).normalized().unwrap();
        assert!((state.overlap(&oracle_state).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn truncation_error_when_dim_too_small() {
        let r = build_state(CoherentLabel::new(DeformationKind::Linear, c(3.0, 0.0)), 8);
        assert!(matches!(r, Err(Error::Truncation { .. })));
    }

    #[test]
    fn states_are_eigenstates_of_their_deformed_lowering() {
        let dim = 64;
        for family in [
            DeformationKind::Linear,
            DeformationKind::ShiftedNumber,
            DeformationKind::Number,
        ] {
            let alpha = c(0.8, -1.1);
            let state = build_state(CoherentLabel::new(family, alpha), dim).unwrap();
            let op = deformed_lowering(family, dim).unwrap();
            let resid = crate::fock::eigen_residual(&op, alpha, state.coeffs());
            assert!(resid < 1e-10, "{family:?}: residual {resid:.3e}");
        }
    }

    #[test]
    fn general_nlcs_reproduces_the_three_families() {
        let dim = 48;
        let alpha = c(0.9, 0.4);
        type Profile = fn(u64) -> f64;
        let cases: [(Profile, DeformationKind); 3] = [
            (|_| 1.0, DeformationKind::Linear),
            (|n| (n + 1) as f64, DeformationKind::ShiftedNumber),
            (|n| n as f64, DeformationKind::Number),
        ];
        for (f, family) in cases {
            let general = build_general_nlcs(f, alpha, dim).unwrap();
            let direct = build_state(CoherentLabel::new(family, alpha), dim).unwrap();
            assert!(
                (general.overlap(&direct).norm() - 1.0).abs() < 1e-12,
                "{family:?}"
            );
        }
    }

    #[test]
    fn general_nlcs_rejects_interior_zeros() {
        // f(2) = 0 with f(0) != 0 is not a supported pattern.
        let r = build_general_nlcs(|n| if n == 2 { 0.0 } else { 1.0 }, c(0.5, 0.0), 16);
        assert!(r.is_err());
    }

    #[test]
    fn linear_product_is_exactly_half() {
        for alpha in grid25() {
            let rep =
                closed_form_moments(CoherentLabel::new(DeformationKind::Linear, alpha)).unwrap();
            assert!((rep.product - 0.5).abs() < 1e-12, "alpha = {alpha}");
        }
    }

    #[test]
    fn family_limits_at_zero_amplitude() {
        let nl = closed_form_moments(CoherentLabel::new(
            DeformationKind::ShiftedNumber,
            c(0.0, 0.0),
        ))
        .unwrap();
        assert!((nl.product - 0.5).abs() < 1e-12);
        let cap_nl =
            closed_form_moments(CoherentLabel::new(DeformationKind::Number, c(0.0, 0.0))).unwrap();
        assert!((cap_nl.product - 1.5).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_oracle_on_grid() {
        let dim = 64;
        for family in [
            DeformationKind::Linear,
            DeformationKind::ShiftedNumber,
            DeformationKind::Number,
        ] {
            for alpha in grid25() {
                let rep = closed_form_moments(CoherentLabel::new(family, alpha)).unwrap();
                let state = build_state(CoherentLabel::new(family, alpha), dim).unwrap();
                let oracle = oracle_moments(&state).unwrap();
                for (a, b, name) in [
                    (rep.mean_x, oracle.mean_x, "mean_x"),
                    (rep.mean_p, oracle.mean_p, "mean_p"),
                    (rep.mean_x2, oracle.mean_x2, "mean_x2"),
                    (rep.mean_p2, oracle.mean_p2, "mean_p2"),
                    (rep.var_x, oracle.var_x, "var_x"),
                    (rep.var_p, oracle.var_p, "var_p"),
                    (rep.product, oracle.product, "product"),
                ] {
                    assert!(
                        (a - b).abs() < 1e-8,
                        "{family:?} {name} at {alpha}: {a} vs {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn cross_elements_reduce_to_single_state_moments() {
        let alpha = c(1.2, -0.7);
        let el = cross_matrix_elements(DeformationKind::ShiftedNumber, alpha, alpha).unwrap();
        let rep =
            closed_form_moments(CoherentLabel::new(DeformationKind::ShiftedNumber, alpha)).unwrap();
        assert!((el.overlap - c(1.0, 0.0)).norm() < 1e-13);
        assert!((el.x.re - rep.mean_x).abs() < 1e-12);
        assert!((el.p.re - rep.mean_p).abs() < 1e-12);
        assert!((el.x2.re - rep.mean_x2).abs() < 1e-12);
        assert!((el.p2.re - rep.mean_p2).abs() < 1e-12);
    }

    #[test]
    fn cross_elements_of_number_family_at_zero() {
        let el = cross_matrix_elements(DeformationKind::Number, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((el.overlap - c(1.0, 0.0)).norm() < 1e-14);
        assert!(el.x.norm() < 1e-14);
        assert!(el.p.norm() < 1e-14);
        assert!((el.x2 - c(1.5, 0.0)).norm() < 1e-14);
        assert!((el.p2 - c(1.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn cross_elements_match_matrix_sandwiches() {
        let dim = 64;
        let a1 = c(1.0, 0.0);
        let a2 = c(0.0, 1.0);
        for family in [
            DeformationKind::Linear,
            DeformationKind::ShiftedNumber,
            DeformationKind::Number,
        ] {
            let el = cross_matrix_elements(family, a1, a2).unwrap();
            let s1 = build_state(CoherentLabel::new(family, a1), dim).unwrap();
            let s2 = build_state(CoherentLabel::new(family, a2), dim).unwrap();
            let (x, p) = quadrature_matrices(dim).unwrap();
            let x2 = &x * &x;
            let p2 = &p * &p;
            let pairs = [
                (el.overlap, s1.overlap(&s2), "overlap"),
                (el.x, s1.matrix_element(&x, &s2).unwrap(), "x"),
                (el.x2, s1.matrix_element(&x2, &s2).unwrap(), "x2"),
                (el.p, s1.matrix_element(&p, &s2).unwrap(), "p"),
                (el.p2, s1.matrix_element(&p2, &s2).unwrap(), "p2"),
            ];
            for (closed, sandwich, name) in pairs {
                assert!(
                    (closed - sandwich).norm() < 1e-8,
                    "{family:?} {name}: {closed} vs {sandwich}"
                );
            }
            // And the number element used by the geometric phases.
            let n_el = cross_number_element(family, a1, a2).unwrap();
            let nmat = crate::fock::number_matrix(dim);
            let sandwich = s1.matrix_element(&nmat, &s2).unwrap();
            assert!((n_el - sandwich).norm() < 1e-8, "{family:?} number element");
        }
    }

    #[test]
    fn truncation_tail_overlap_between_dim_and_double_dim() {
        for family in [
            DeformationKind::Linear,
            DeformationKind::ShiftedNumber,
            DeformationKind::Number,
        ] {
            let alpha = c(2.1, -1.3);
            let small = build_state(CoherentLabel::new(family, alpha), 64).unwrap();
            let large = build_state(CoherentLabel::new(family, alpha), 128).unwrap();
            let overlap = small.padded(128).unwrap().overlap(&large).norm();
            assert!(overlap > 1.0 - 1e-12, "{family:?}: overlap {overlap}");
        }
    }

    proptest! {
        #[test]
        fn heisenberg_bound_holds(
            re in -3.0f64..3.0,
            im in -3.0f64..3.0,
            family_idx in 0usize..3,
        ) {
            let family = [
                DeformationKind::Linear,
                DeformationKind::ShiftedNumber,
                DeformationKind::Number,
            ][family_idx];
            let rep = closed_form_moments(CoherentLabel::new(family, c(re, im))).unwrap();
            prop_assert!(rep.product >= 0.5 - 1e-10);
            prop_assert!(rep.var_x >= 0.0 && rep.var_p >= 0.0);
        }

        #[test]
        fn quarter_turn_phase_covariance(
            re in -3.0f64..3.0,
            im in -3.0f64..3.0,
            family_idx in 0usize..3,
        ) {
            let family = [
                DeformationKind::Linear,
                DeformationKind::ShiftedNumber,
                DeformationKind::Number,
            ][family_idx];
            let alpha = c(re, im);
            let rotated = alpha * C64::new(0.0, 1.0);
            let a = closed_form_moments(CoherentLabel::new(family, alpha)).unwrap();
            let b = closed_form_moments(CoherentLabel::new(family, rotated)).unwrap();
            // A quarter turn maps (x, p) -> (-p, x).
            prop_assert!((b.mean_x + a.mean_p).abs() < 1e-10);
            prop_assert!((b.mean_p - a.mean_x).abs() < 1e-10);
            prop_assert!((a.product - b.product).abs() < 1e-10);
        }
    }
}
