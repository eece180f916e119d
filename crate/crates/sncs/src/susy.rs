//! The SUSY harmonic oscillator: block Hamiltonian, the general family of
//! annihilation operators it admits, and the K-matrix classification that
//! decides which supercoherent-state construction applies.

use crate::fock::{deformed_lowering, number_matrix, DeformationKind};
use crate::{C64, CMatrix, Error, Result};

/// Default relative tolerance for the family classification.
pub const CLASSIFY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum KFamily {
    /// Distinct nonzero eigenvalues.
    Generic,
    /// Equal nonzero eigenvalues: (k1 - k4)^2 + 4 k2 k3 = 0.
    Degenerate,
    /// Zero determinant: k1 k4 = k2 k3.
    Singular,
}

impl KFamily {
    pub fn label(self) -> &'static str {
        match self {
            KFamily::Generic => "generic",
            KFamily::Degenerate => "degenerate",
            KFamily::Singular => "singular",
        }
    }
}

/// The 2x2 parameter matrix of the annihilation-operator family, with its
/// eigenvalues and family tag precomputed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMatrix {
    pub k1: C64,
    pub k2: C64,
    pub k3: C64,
    pub k4: C64,
    pub kappa_plus: C64,
    pub kappa_minus: C64,
    pub family: KFamily,
}

/// Classify a K matrix.
///
/// kappa_pm = (k1 + k4)/2 +- sqrt((k1 - k4)^2/4 + k2 k3) with the principal
/// square root. Degenerate wins only when kappa != 0; a vanishing eigenvalue
/// product always reads Singular.
pub fn classify(k1: C64, k2: C64, k3: C64, k4: C64, tolerance: f64) -> Result<KMatrix> {
    for (name, k) in [("k1", k1), ("k2", k2), ("k3", k3), ("k4", k4)] {
        if !k.is_finite() {
            return Err(Error::Domain(format!("{name} is not finite")));
        }
    }
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::Domain("classification tolerance must be > 0".into()));
    }
    let half_trace = (k1 + k4) * 0.5;
    let discriminant = (k1 - k4) * (k1 - k4) + 4.0 * k2 * k3;
    let root = (discriminant * 0.25).sqrt();
    let kappa_plus = half_trace + root;
    let kappa_minus = half_trace - root;

    let scale = (k1.norm() + k4.norm()).powi(2);
    let degenerate = discriminant.norm() < tolerance * scale;
    let product = kappa_plus * kappa_minus;
    let singular =
        product.norm() < tolerance * kappa_plus.norm_sqr().max(kappa_minus.norm_sqr()).max(1.0);

    let family = if degenerate && !singular {
        KFamily::Degenerate
    } else if singular {
        KFamily::Singular
    } else {
        KFamily::Generic
    };

    Ok(KMatrix {
        k1,
        k2,
        k3,
        k4,
        kappa_plus,
        kappa_minus,
        family,
    })
}

impl KMatrix {
    /// Classification at the default tolerance.
    pub fn new(k1: C64, k2: C64, k3: C64, k4: C64) -> Result<Self> {
        classify(k1, k2, k3, k4, CLASSIFY_TOL)
    }

    /// The one-parameter family with k1 = k4 = 1, k2 = cos(theta),
    /// k3 = sin(theta); its eigenvalues are 1 +- sqrt(sin(2 theta)/2).
    pub fn theta_family(theta: f64) -> Result<Self> {
        Self::new(
            C64::new(1.0, 0.0),
            C64::new(theta.cos(), 0.0),
            C64::new(theta.sin(), 0.0),
            C64::new(1.0, 0.0),
        )
    }

    /// Mean eigenvalue; the relevant kappa in the degenerate family.
    pub fn kappa(&self) -> C64 {
        (self.kappa_plus + self.kappa_minus) * 0.5
    }
}

/// Block-diagonal SUSY Hamiltonian diag(omega N, omega (N + 1)) as a
/// 2dim x 2dim matrix (block-major: upper component first).
///
/// The lower block is written as the exact diagonal N + 1 rather than the
/// truncated product a a^+, so the spectrum stays n omega all the way to the
/// edge.
pub fn susy_hamiltonian(omega: f64, dim: usize) -> Result<CMatrix> {
    if omega.is_nan() || omega <= 0.0 {
        return Err(Error::Domain(format!("omega must be > 0, got {omega}")));
    }
    if dim < 2 {
        return Err(Error::Domain(format!("dim must be >= 2, got {dim}")));
    }
    let mut h = CMatrix::zeros(2 * dim, 2 * dim);
    for n in 0..dim {
        h[(n, n)] = C64::new(omega * n as f64, 0.0);
        h[(dim + n, dim + n)] = C64::new(omega * (n as f64 + 1.0), 0.0);
    }
    Ok(h)
}

/// Assemble a 2dim x 2dim block matrix from four dim x dim blocks.
pub fn block2(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> CMatrix {
    let dim = a.nrows();
    let mut m = CMatrix::zeros(2 * dim, 2 * dim);
    m.view_mut((0, 0), (dim, dim)).copy_from(a);
    m.view_mut((0, dim), (dim, dim)).copy_from(b);
    m.view_mut((dim, 0), (dim, dim)).copy_from(c);
    m.view_mut((dim, dim), (dim, dim)).copy_from(d);
    m
}

/// The (possibly deformed) SUSY annihilation operator
/// [[k1 a_f, k2], [k3 a_f^2, k4 a_f]] as a truncated block matrix.
pub fn sao_matrix(k: &KMatrix, kind: DeformationKind, dim: usize) -> Result<CMatrix> {
    if dim < 3 {
        return Err(Error::Domain(format!("dim must be >= 3, got {dim}")));
    }
    let af = deformed_lowering(kind, dim)?;
    let af2 = &af * &af;
    let identity = CMatrix::identity(dim, dim);
    Ok(block2(
        &(&af * k.k1),
        &(identity * k.k2),
        &(&af2 * k.k3),
        &(&af * k.k4),
    ))
}

/// Max-entry norm of [H, A] + omega A restricted to all but the last `drop`
/// Fock levels of each block.
pub fn commutator_defect(
    k: &KMatrix,
    kind: DeformationKind,
    omega: f64,
    dim: usize,
    drop: usize,
) -> Result<f64> {
    let h = susy_hamiltonian(omega, dim)?;
    let a = sao_matrix(k, kind, dim)?;
    let defect = &h * &a - &a * &h + &a * C64::new(omega, 0.0);
    let keep = dim - drop;
    let mut max = 0.0f64;
    for bi in 0..2 {
        for bj in 0..2 {
            for i in 0..keep {
                for j in 0..keep {
                    max = max.max(defect[(bi * dim + i, bj * dim + j)].norm());
                }
            }
        }
    }
    Ok(max)
}

/// Number operator extended to the spinor space: diag(N, N + 1), i.e. the
/// Hamiltonian at omega = 1.
pub fn spinor_number_matrix(dim: usize) -> CMatrix {
    let n = number_matrix(dim);
    let np1 = &n + CMatrix::identity(dim, dim);
    block2(
        &n,
        &CMatrix::zeros(dim, dim),
        &CMatrix::zeros(dim, dim),
        &np1,
    )
}
