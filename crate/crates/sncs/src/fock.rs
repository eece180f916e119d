//! Truncated Fock-space matrices and the brute-force oracles built on them.
//!
//! Everything here is deliberately independent of the closed-form modules:
//! states are validated by least-squares null spaces and matrix sandwiches,
//! never by re-running the series that produced them.

use nalgebra::SVD;

use crate::{C64, CMatrix, CVector, Error, Result};

/// Residual bound below which an oracle eigenvector is accepted; downstream
/// modules use the same number as their pass criterion.
pub const ORACLE_RESIDUAL_TOL: f64 = 1e-8;

/// Default Fock-space truncation, adequate for eigenvalues of modulus <= 3.
pub const DEFAULT_DIM: usize = 64;

/// Deformation of the annihilation operator: a_f = f(N) a.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum DeformationKind {
    /// f(N) = 1, the undeformed ladder operator.
    Linear,
    /// f(N) = N + 1.
    ShiftedNumber,
    /// f(N) = N; kills |1> because f(0) = 0.
    Number,
}

impl DeformationKind {
    /// f(n) evaluated at a Fock index.
    pub fn f(self, n: u64) -> f64 {
        match self {
            DeformationKind::Linear => 1.0,
            DeformationKind::ShiftedNumber => (n + 1) as f64,
            DeformationKind::Number => n as f64,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            DeformationKind::Linear => "linear",
            DeformationKind::ShiftedNumber => "nl",
            DeformationKind::Number => "NL",
        }
    }
}

/// Finite complex coefficient vector over |0> .. |dim-1>.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coeffs: CVector,
}

impl FockVector {
    pub fn new(coeffs: CVector) -> Self {
        Self { coeffs }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            coeffs: CVector::zeros(dim),
        }
    }

    /// The basis state |n>.
    pub fn basis(dim: usize, n: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[n] = C64::new(1.0, 0.0);
        Self { coeffs: v }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, n: usize) -> C64 {
        self.coeffs[n]
    }

    pub fn coeffs(&self) -> &CVector {
        &self.coeffs
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// <self|other>.
    pub fn overlap(&self, other: &FockVector) -> C64 {
        assert_eq!(self.dim(), other.dim(), "overlap dimension mismatch");
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            coeffs: &self.coeffs * c,
        }
    }

    pub fn add(&self, other: &FockVector) -> Self {
        Self {
            coeffs: &self.coeffs + &other.coeffs,
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            coeffs: &self.coeffs / C64::new(n, 0.0),
        })
    }

    /// Zero-pad (or error on shrink) to a larger truncation.
    pub fn padded(&self, dim: usize) -> Result<Self> {
        if dim < self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot pad {} down to {}",
                self.dim(),
                dim
            )));
        }
        let mut v = CVector::zeros(dim);
        v.rows_mut(0, self.dim()).copy_from(&self.coeffs);
        Ok(Self { coeffs: v })
    }

    /// <self|op|self> / <self|self>.
    pub fn expectation(&self, op: &CMatrix) -> Result<C64> {
        let n2 = self.norm_sq();
        if n2 == 0.0 {
            return Err(Error::ZeroNorm);
        }
        check_op_dim(op, self.dim())?;
        let applied = op * &self.coeffs;
        Ok(self.coeffs.dotc(&applied) / n2)
    }

    /// <self|op|other> (not normalized).
    pub fn matrix_element(&self, op: &CMatrix, other: &FockVector) -> Result<C64> {
        check_op_dim(op, self.dim())?;
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch(
                "bra and ket dims differ".to_string(),
            ));
        }
        let applied = op * &other.coeffs;
        Ok(self.coeffs.dotc(&applied))
    }
}

/// Pair of Fock vectors: the upper/lower components of a SUSY spinor state.
///
/// Indexing is block-major: a flattened spinor stores all upper coefficients
/// first, then all lower ones. The lower component's |m> coefficient sits at
/// energy (m+1) * omega.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorState {
    upper: FockVector,
    lower: FockVector,
}

impl SpinorState {
    pub fn new(upper: FockVector, lower: FockVector) -> Result<Self> {
        if upper.dim() != lower.dim() {
            return Err(Error::DimensionMismatch(format!(
                "spinor components have dims {} and {}",
                upper.dim(),
                lower.dim()
            )));
        }
        Ok(Self { upper, lower })
    }

    pub fn upper(&self) -> &FockVector {
        &self.upper
    }

    pub fn lower(&self) -> &FockVector {
        &self.lower
    }

    pub fn dim(&self) -> usize {
        self.upper.dim()
    }

    pub fn joint_norm_sq(&self) -> f64 {
        self.upper.norm_sq() + self.lower.norm_sq()
    }

    pub fn joint_norm(&self) -> f64 {
        self.joint_norm_sq().sqrt()
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            upper: self.upper.scaled(c),
            lower: self.lower.scaled(c),
        }
    }

    pub fn add(&self, other: &SpinorState) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(
                "spinor addition dims differ".to_string(),
            ));
        }
        Ok(Self {
            upper: self.upper.add(&other.upper),
            lower: self.lower.add(&other.lower),
        })
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.joint_norm();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    /// <self|other> with the block-major inner product.
    pub fn overlap(&self, other: &SpinorState) -> C64 {
        self.upper.overlap(&other.upper) + self.lower.overlap(&other.lower)
    }

    /// Flatten into a 2*dim vector, upper block first.
    pub fn to_flat(&self) -> CVector {
        let dim = self.dim();
        let mut v = CVector::zeros(2 * dim);
        v.rows_mut(0, dim).copy_from(self.upper.coeffs());
        v.rows_mut(dim, dim).copy_from(self.lower.coeffs());
        v
    }

    pub fn from_flat(v: &CVector) -> Result<Self> {
        if !v.len().is_multiple_of(2) {
            return Err(Error::DimensionMismatch(
                "flat spinor length must be even".to_string(),
            ));
        }
        let dim = v.len() / 2;
        Ok(Self {
            upper: FockVector::new(v.rows(0, dim).into_owned()),
            lower: FockVector::new(v.rows(dim, dim).into_owned()),
        })
    }

    /// Expectation of a scalar operator acting identically on both components.
    pub fn expectation_scalar(&self, op: &CMatrix) -> Result<C64> {
        let n2 = self.joint_norm_sq();
        if n2 == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let up = self.upper.matrix_element(op, &self.upper)?;
        let lo = self.lower.matrix_element(op, &self.lower)?;
        Ok((up + lo) / n2)
    }

    /// Expectation of a full 2dim x 2dim block operator.
    pub fn expectation_block(&self, op: &CMatrix) -> Result<C64> {
        let n2 = self.joint_norm_sq();
        if n2 == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let flat = self.to_flat();
        check_op_dim(op, flat.len())?;
        let applied = op * &flat;
        Ok(flat.dotc(&applied) / n2)
    }
}

fn check_op_dim(op: &CMatrix, dim: usize) -> Result<()> {
    if op.nrows() != dim || op.ncols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, state dim is {}",
            op.nrows(),
            op.ncols(),
            dim
        )));
    }
    Ok(())
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::Domain(format!("dim must be >= 2, got {dim}")));
    }
    Ok(())
}

/// Truncated lowering, raising and number matrices.
///
/// The raising matrix is the adjoint of the lowering one, which zeroes the
/// row lost to truncation.
pub fn ladder_matrices(dim: usize) -> Result<(CMatrix, CMatrix, CMatrix)> {
    check_dim(dim)?;
    let mut lowering = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        lowering[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    let raising = lowering.adjoint();
    let number = number_matrix(dim);
    Ok((lowering, raising, number))
}

/// Diagonal number operator 0..dim-1.
pub fn number_matrix(dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            C64::new(i as f64, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Deformed lowering matrix: a_f |n> = sqrt(n) f(n-1) |n-1>.
pub fn deformed_lowering(kind: DeformationKind, dim: usize) -> Result<CMatrix> {
    check_dim(dim)?;
    let mut m = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        let amp = (n as f64).sqrt() * kind.f((n - 1) as u64);
        m[(n - 1, n)] = C64::new(amp, 0.0);
    }
    Ok(m)
}

/// Position and momentum matrices for hbar = m = omega = 1.
pub fn quadrature_matrices(dim: usize) -> Result<(CMatrix, CMatrix)> {
    let (lowering, raising, _) = ladder_matrices(dim)?;
    let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
    let position = (&lowering + &raising) * C64::new(inv_sqrt2, 0.0);
    let momentum = (&lowering - &raising) * C64::new(0.0, inv_sqrt2);
    // (a - a^+)/(i sqrt2) = -i (a - a^+)/sqrt2 = i (a^+ - a)/sqrt2
    let momentum = -momentum;
    Ok((position, momentum))
}

/// One vector of an oracle null-space basis together with its residual.
#[derive(Debug, Clone)]
pub struct OracleVector {
    pub vector: CVector,
    /// ||(op - lambda I) v|| / ||v||.
    pub residual: f64,
}

/// Least-squares eigenvectors of `op` at `eigenvalue`.
///
/// Takes the `free_slots.len()` smallest singular directions of
/// op - lambda I and re-expresses them so that vector i carries coefficient
/// 1 at `free_slots[i]` and 0 at the other designated slots. Fully
/// independent of any series construction, which is the point.
pub fn oracle_eigenbasis(
    op: &CMatrix,
    eigenvalue: C64,
    free_slots: &[usize],
    residual_tol: f64,
) -> Result<Vec<OracleVector>> {
    if op.nrows() != op.ncols() {
        return Err(Error::DimensionMismatch("operator must be square".into()));
    }
    if !eigenvalue.is_finite() {
        return Err(Error::Domain("eigenvalue is not finite".into()));
    }
    let n = op.nrows();
    let k = free_slots.len();
    if k == 0 || k >= n {
        return Err(Error::Domain(format!(
            "need 1 <= free slots < dim, got {k} of {n}"
        )));
    }
    if free_slots.iter().any(|&s| s >= n) {
        return Err(Error::Domain("free slot index out of range".into()));
    }

    let mut shifted = op.clone();
    for i in 0..n {
        shifted[(i, i)] -= eigenvalue;
    }
    let svd = SVD::new(shifted.clone(), false, true);
    let v_t = svd.v_t.as_ref().expect("SVD with v_t requested");

    // Singular values are sorted descending; the null space lives in the
    // last k right-singular vectors (rows of V^H, conjugated back).
    let mut basis: Vec<CVector> = Vec::with_capacity(k);
    for row in (n - k)..n {
        let v = v_t.row(row).transpose().map(|c| c.conj());
        let resid = (&shifted * &v).norm();
        if resid > residual_tol {
            return Err(Error::NoEigenvector {
                residual: resid,
                tolerance: residual_tol,
            });
        }
        basis.push(v);
    }

    // Solve the small k x k system so the returned vectors are unit on their
    // own free slot and zero on the others.
    let mut slot_matrix = CMatrix::zeros(k, k);
    for (j, v) in basis.iter().enumerate() {
        for (i, &slot) in free_slots.iter().enumerate() {
            slot_matrix[(i, j)] = v[slot];
        }
    }
    let inv = slot_matrix.try_inverse().ok_or_else(|| {
        Error::Domain("free slots do not parameterize the null space".to_string())
    })?;

    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let mut v = CVector::zeros(n);
        for (j, b) in basis.iter().enumerate() {
            v += b * inv[(j, i)];
        }
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let residual = (&shifted * &v).norm() / norm;
        out.push(OracleVector {
            vector: v,
            residual,
        });
    }
    Ok(out)
}

/// Single-free-slot convenience wrapper around [`oracle_eigenbasis`].
pub fn oracle_eigenstate(
    op: &CMatrix,
    eigenvalue: C64,
    free_slot: usize,
    residual_tol: f64,
) -> Result<OracleVector> {
    let mut basis = oracle_eigenbasis(op, eigenvalue, &[free_slot], residual_tol)?;
    Ok(basis.remove(0))
}

/// ||op v - lambda v|| / ||v|| for a flat vector.
pub fn eigen_residual(op: &CMatrix, eigenvalue: C64, v: &CVector) -> f64 {
    let norm = v.norm();
    if norm == 0.0 {
        return f64::INFINITY;
    }
    (op * v - v * eigenvalue).norm() / norm
}

/// Eigen-residual of a spinor state, with the operator truncated `drop`
/// levels below the stored dim so the raising-edge artifact stays out.
pub fn spinor_eigen_residual(op: &CMatrix, eigenvalue: C64, state: &SpinorState, drop: usize) -> f64 {
    let dim = state.dim();
    assert!(drop < dim, "cannot drop {drop} of {dim} levels");
    let keep = dim - drop;
    let flat = state.to_flat();
    // Project both the state and the operator action onto the kept levels of
    // each block.
    let applied = op * &flat - &flat * eigenvalue;
    let mut resid_sq = 0.0;
    let mut norm_sq = 0.0;
    for block in 0..2 {
        for i in 0..keep {
            resid_sq += applied[block * dim + i].norm_sqr();
            norm_sq += flat[block * dim + i].norm_sqr();
        }
    }
    if norm_sq == 0.0 {
        return f64::INFINITY;
    }
    (resid_sq / norm_sq).sqrt()
}
