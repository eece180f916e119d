//! The self-check suite behind `sncs validate`: oracle equivalences,
//! eigen-residuals, commutators, limit values and Heisenberg bounds, with
//! K matrices drawn from a seeded generator so reports are reproducible
//! byte for byte.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coherent::{
    build_state, closed_form_moments, oracle_moments, oracle_spinor_moments, CoherentLabel,
};
use crate::fock::{DeformationKind, DEFAULT_DIM};
use crate::geomphase::{closed_form_beta, evolution_loop_check, geometric_phase_oracle};
use crate::supercoherent::{
    build_degenerate, build_generic, build_singular, build_superposition,
    closed_form_spinor_moments, superpose, SuperCoherentSpec, SuperpositionParams,
};
use crate::susy::{commutator_defect, sao_matrix, KFamily, KMatrix};
use crate::{C64, Result};

pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub dim: usize,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "validation suite (dim = {}, seed = {})", self.dim, self.seed)?;
        for check in &self.checks {
            let tag = if check.passed { "PASS" } else { "FAIL" };
            writeln!(f, "  [{tag}] {:<38} {}", check.name, check.detail)?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        if failed == 0 {
            writeln!(f, "all {} checks passed", self.checks.len())
        } else {
            writeln!(f, "{failed} of {} checks FAILED", self.checks.len())
        }
    }
}

const KINDS: [DeformationKind; 3] = [
    DeformationKind::Linear,
    DeformationKind::ShiftedNumber,
    DeformationKind::Number,
];

fn random_complex(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    C64::new(
        rng.gen_range(-radius..radius),
        rng.gen_range(-radius..radius),
    )
}

/// A generic K matrix with well-separated, well-sized eigenvalues, so the
/// test states fit the truncation comfortably.
fn random_generic_k(rng: &mut ChaCha8Rng) -> KMatrix {
    loop {
        let k = KMatrix::new(
            random_complex(rng, 1.5),
            random_complex(rng, 1.5),
            random_complex(rng, 1.5),
            random_complex(rng, 1.5),
        )
        .expect("finite entries");
        let gap = (k.kappa_plus - k.kappa_minus).norm();
        let small = k.kappa_plus.norm().min(k.kappa_minus.norm());
        if k.family == KFamily::Generic
            && small > 0.3
            && gap > 0.1 * (k.kappa_plus.norm() + k.kappa_minus.norm())
        {
            return k;
        }
    }
}

fn random_degenerate_k(rng: &mut ChaCha8Rng) -> KMatrix {
    loop {
        let kappa = random_complex(rng, 1.2);
        let k1 = random_complex(rng, 1.2);
        let k2 = random_complex(rng, 1.2);
        if kappa.norm() < 0.4 || k2.norm() < 0.2 || k1.norm() < 0.2 {
            continue;
        }
        let k4 = kappa * 2.0 - k1;
        let k3 = -(k1 - k4) * (k1 - k4) / (4.0 * k2);
        let k = KMatrix::new(k1, k2, k3, k4).expect("finite entries");
        if k.family == KFamily::Degenerate {
            return k;
        }
    }
}

fn random_singular_k(rng: &mut ChaCha8Rng) -> KMatrix {
    loop {
        let k1 = random_complex(rng, 1.2);
        let k2 = random_complex(rng, 1.2);
        let k3 = random_complex(rng, 1.2);
        if k1.norm() < 0.3 {
            continue;
        }
        let k4 = k2 * k3 / k1;
        let k = KMatrix::new(k1, k2, k3, k4).expect("finite entries");
        // phi = eigenvalue / (k1 + k4) must stay defined.
        if k.family == KFamily::Singular && (k.k1 + k.k4).norm() > 0.3 {
            return k;
        }
    }
}

/// Eigenvalue sized so every component coherent state fits the truncation.
fn random_eigenvalue(rng: &mut ChaCha8Rng, k: &KMatrix) -> C64 {
    let smallest = k.kappa_plus.norm().min(k.kappa_minus.norm()).min(1.0);
    random_complex(rng, smallest.max(0.2))
}

fn check<F>(name: &'static str, f: F) -> CheckResult
where
    F: FnOnce() -> Result<(bool, String)>,
{
    match f() {
        Ok((passed, detail)) => CheckResult {
            name,
            passed,
            detail,
        },
        Err(e) => CheckResult {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn fmt_max(max: f64, bound: f64) -> String {
    format!("max {max:.3e} (bound {bound:.1e})")
}

/// Run the whole suite. Deterministic for a fixed (dim, seed) pair.
pub fn run_validation(dim: usize, seed: u64) -> ValidationReport {
    let mut checks = Vec::new();

    checks.push(check("hypergeom vs direct summation", || {
        let mut max: f64 = 0.0;
        for &x in &[-50.0, -5.0, -1.0, 0.0, 1.0, 5.0, 50.0] {
            for (b1, b2) in [(1.0, 1.0), (1.0, 2.0), (2.0, 2.0), (1.0, 3.0), (2.0, 3.0)] {
                let fast = crate::hypergeom::f02(b1, b2, C64::new(x, 0.0))?;
                let mut direct = C64::new(0.0, 0.0);
                let mut term = C64::new(1.0, 0.0);
                for n in 0..200 {
                    direct += term;
                    let nf = n as f64;
                    term *= C64::new(x, 0.0) / ((b1 + nf) * (b2 + nf) * (nf + 1.0));
                }
                max = max.max((fast - direct).norm() / direct.norm().max(1.0));
            }
        }
        Ok((max < 1e-13, fmt_max(max, 1e-13)))
    }));

    checks.push(check("scalar limit values at zero amplitude", || {
        let origin = C64::new(0.0, 0.0);
        let nl = closed_form_moments(CoherentLabel::new(DeformationKind::ShiftedNumber, origin))?;
        let cap = closed_form_moments(CoherentLabel::new(DeformationKind::Number, origin))?;
        let d1 = (nl.product - 0.5).abs();
        let d2 = (cap.product - 1.5).abs();
        let max = d1.max(d2);
        Ok((max < 1e-10, fmt_max(max, 1e-10)))
    }));

    checks.push(check("standard coherent product = 1/2", || {
        let mut max: f64 = 0.0;
        for i in 0..5 {
            for j in 0..5 {
                let alpha = C64::new(-3.0 + 1.5 * i as f64, -3.0 + 1.5 * j as f64);
                let rep = closed_form_moments(CoherentLabel::new(DeformationKind::Linear, alpha))?;
                max = max.max((rep.product - 0.5).abs());
            }
        }
        Ok((max < 1e-10, fmt_max(max, 1e-10)))
    }));

    checks.push(check("scalar closed form vs matrix oracle", move || {
        let mut max: f64 = 0.0;
        for kind in KINDS {
            for i in 0..3 {
                for j in 0..3 {
                    let alpha = C64::new(-2.4 + 2.4 * i as f64, -2.4 + 2.4 * j as f64);
                    let rep = closed_form_moments(CoherentLabel::new(kind, alpha))?;
                    let state = build_state(CoherentLabel::new(kind, alpha), dim)?;
                    let oracle = oracle_moments(&state)?;
                    for (a, b) in [
                        (rep.mean_x, oracle.mean_x),
                        (rep.mean_p, oracle.mean_p),
                        (rep.mean_x2, oracle.mean_x2),
                        (rep.mean_p2, oracle.mean_p2),
                        (rep.product, oracle.product),
                    ] {
                        max = max.max((a - b).abs());
                    }
                }
            }
        }
        Ok((max < 1e-8, fmt_max(max, 1e-8)))
    }));

    checks.push(check("truncation tails at dim vs 2 dim", move || {
        let mut min_overlap: f64 = 1.0;
        for kind in KINDS {
            let alpha = C64::new(1.8, -1.7);
            let small = build_state(CoherentLabel::new(kind, alpha), dim)?;
            let large = build_state(CoherentLabel::new(kind, alpha), 2 * dim)?;
            min_overlap = min_overlap.min(small.padded(2 * dim)?.overlap(&large).norm());
        }
        Ok((
            min_overlap > 1.0 - 1e-12,
            format!("min overlap 1 - {:.3e}", 1.0 - min_overlap),
        ))
    }));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let generic_draws: Vec<KMatrix> = (0..20).map(|_| random_generic_k(&mut rng)).collect();
    let degenerate_draws: Vec<KMatrix> = (0..5).map(|_| random_degenerate_k(&mut rng)).collect();
    let singular_draws: Vec<KMatrix> = (0..5).map(|_| random_singular_k(&mut rng)).collect();
    let eigen_rng = &mut rng;

    checks.push(check("commutator [H,A] = -omega A", || {
        let mut max: f64 = 0.0;
        for k in &generic_draws {
            for kind in KINDS {
                max = max.max(commutator_defect(k, kind, 1.0, 16, 2)?);
            }
        }
        Ok((max < 1e-10, fmt_max(max, 1e-10)))
    }));

    checks.push(check("eigen-residuals of built states", {
        let generic_draws = generic_draws.clone();
        let degenerate_draws = degenerate_draws.clone();
        let singular_draws = singular_draws.clone();
        let mut draws_y: Vec<C64> = Vec::new();
        for k in generic_draws
            .iter()
            .chain(&degenerate_draws)
            .chain(&singular_draws)
        {
            draws_y.push(random_eigenvalue(eigen_rng, k));
        }
        move || {
            let mut max_generic: f64 = 0.0;
            let mut max_degenerate: f64 = 0.0;
            let mut idx = 0;
            let params = SuperpositionParams::quarter();
            for k in &generic_draws {
                let y = draws_y[idx];
                idx += 1;
                for kind in KINDS {
                    let spec = SuperCoherentSpec::new(*k, kind, y);
                    let a = sao_matrix(k, kind, dim)?;
                    let (plus, minus) = build_generic(&spec, dim)?;
                    let s = superpose((&plus, &minus), &params)?;
                    for state in [&plus, &minus, &s] {
                        max_generic = max_generic
                            .max(crate::fock::spinor_eigen_residual(&a, y, state, 2));
                    }
                }
            }
            // Theta-family eigenvalue sweep on top of the random draws.
            for theta in [PI / 4.0, 3.0 * PI / 4.0] {
                let k = KMatrix::theta_family(theta)?;
                for kind in [DeformationKind::ShiftedNumber, DeformationKind::Number] {
                    let y = C64::new(0.9, -0.4);
                    let spec = SuperCoherentSpec::new(k, kind, y);
                    let a = sao_matrix(&k, kind, dim)?;
                    let (plus, minus) = build_generic(&spec, dim)?;
                    for state in [&plus, &minus] {
                        max_generic = max_generic
                            .max(crate::fock::spinor_eigen_residual(&a, y, state, 2));
                    }
                }
            }
            for k in &degenerate_draws {
                let y = draws_y[idx];
                idx += 1;
                for kind in [DeformationKind::ShiftedNumber, DeformationKind::Number] {
                    let spec = SuperCoherentSpec::new(*k, kind, y);
                    let a = sao_matrix(k, kind, (dim * 3) / 2)?;
                    let s = build_degenerate(&spec, C64::new(1.0, 0.0), C64::new(0.4, 0.3), (dim * 3) / 2)?;
                    max_degenerate =
                        max_degenerate.max(crate::fock::spinor_eigen_residual(&a, y, &s, 2));
                }
            }
            for k in &singular_draws {
                let y = draws_y[idx];
                idx += 1;
                for kind in [DeformationKind::ShiftedNumber, DeformationKind::Number] {
                    let spec = SuperCoherentSpec::new(*k, kind, y);
                    let a = sao_matrix(k, kind, dim)?;
                    let s = build_singular(&spec, dim)?;
                    max_generic = max_generic.max(crate::fock::spinor_eigen_residual(&a, y, &s, 2));
                }
            }
            let ok = max_generic < 1e-8 && max_degenerate < 1e-6;
            Ok((
                ok,
                format!("max generic/singular {max_generic:.3e} (1e-8), degenerate {max_degenerate:.3e} (1e-6)"),
            ))
        }
    }));

    checks.push(check("spinor limit values at zero eigenvalue", || {
        let params = SuperpositionParams::quarter();
        let k = KMatrix::theta_family(PI / 4.0)?;
        let nl = closed_form_spinor_moments(
            &SuperCoherentSpec::new(k, DeformationKind::ShiftedNumber, C64::new(0.0, 0.0)),
            &params,
        )?;
        let cap = closed_form_spinor_moments(
            &SuperCoherentSpec::new(k, DeformationKind::Number, C64::new(0.0, 0.0)),
            &params,
        )?;
        let d1 = (nl.product * nl.product - 0.25).abs();
        let d2 = (cap.product * cap.product - 2.25).abs();
        let max = d1.max(d2);
        Ok((max < 1e-8, fmt_max(max, 1e-8)))
    }));

    checks.push(check("spinor closed form vs matrix oracle", move || {
        let params = SuperpositionParams::quarter();
        let mut max: f64 = 0.0;
        for kind in [DeformationKind::ShiftedNumber, DeformationKind::Number] {
            for theta in [PI / 4.0, 3.0 * PI / 4.0] {
                for y in [C64::new(0.5, 0.0), C64::new(0.8, 0.9)] {
                    let spec = SuperCoherentSpec::new(KMatrix::theta_family(theta)?, kind, y);
                    let closed = closed_form_spinor_moments(&spec, &params)?;
                    let state = build_superposition(&spec, &params, dim)?;
                    let oracle = oracle_spinor_moments(&state)?;
                    max = max.max((closed.var_x - oracle.var_x).abs());
                    max = max.max((closed.var_p - oracle.var_p).abs());
                }
            }
        }
        Ok((max < 1e-7, fmt_max(max, 1e-7)))
    }));

    checks.push(check("Heisenberg bound on all scanned states", move || {
        let params = SuperpositionParams::quarter();
        let mut min: f64 = f64::INFINITY;
        for kind in KINDS {
            for i in 0..8 {
                let alpha = C64::new(0.4 * i as f64 - 1.6, 0.3 * i as f64 - 1.2);
                min = min.min(closed_form_moments(CoherentLabel::new(kind, alpha))?.product);
            }
        }
        for kind in [DeformationKind::ShiftedNumber, DeformationKind::Number] {
            for i in 0..8 {
                let y = C64::new(0.25 * i as f64, 0.0);
                let spec =
                    SuperCoherentSpec::new(KMatrix::theta_family(PI / 4.0)?, kind, y);
                min = min.min(closed_form_spinor_moments(&spec, &params)?.product);
            }
        }
        Ok((
            min >= 0.5 - 1e-10,
            format!("min product {min:.12} (bound 0.5 - 1e-10)"),
        ))
    }));

    checks.push(check("evolution loop closes", move || {
        let r1 = evolution_loop_check(1.0, dim.min(128))?;
        let r2 = evolution_loop_check(2.0, dim.min(128))?;
        let max = r1.max(r2);
        Ok((max < 1e-12, fmt_max(max, 1e-12)))
    }));

    checks.push(check("geometric phase closed form vs oracle", move || {
        let params = SuperpositionParams::quarter();
        let mut max: f64 = 0.0;
        for kind in [DeformationKind::ShiftedNumber, DeformationKind::Number] {
            for theta in [PI / 4.0, 3.0 * PI / 4.0] {
                for y in [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.4, 0.7)] {
                    let spec = SuperCoherentSpec::new(KMatrix::theta_family(theta)?, kind, y);
                    let closed = closed_form_beta(&spec, &params, 1.0)?;
                    let state = build_superposition(&spec, &params, dim)?;
                    let oracle = geometric_phase_oracle(&state, 1.0)?;
                    max = max.max((closed.beta - oracle.beta).abs());
                }
            }
        }
        Ok((max < 1e-7, fmt_max(max, 1e-7)))
    }));

    checks.push(check("geometric phase limit values", || {
        let params = SuperpositionParams::quarter();
        let k = KMatrix::theta_family(PI / 4.0)?;
        let origin = C64::new(0.0, 0.0);
        let nl = closed_form_beta(
            &SuperCoherentSpec::new(k, DeformationKind::ShiftedNumber, origin),
            &params,
            1.0,
        )?;
        let cap = closed_form_beta(
            &SuperCoherentSpec::new(k, DeformationKind::Number, origin),
            &params,
            1.0,
        )?;
        let max = nl.beta.abs().max((cap.beta - 2.0 * PI).abs());
        Ok((max < 1e-8, fmt_max(max, 1e-8)))
    }));

    ValidationReport {
        dim,
        seed,
        checks,
    }
}

/// Suite at the library defaults.
pub fn run_default_validation() -> ValidationReport {
    run_validation(DEFAULT_DIM, DEFAULT_SEED)
}
