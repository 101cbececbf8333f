//! Dense complex linear algebra used throughout the crate.
//!
//! Operators are plain `nalgebra` matrices over [`C64`]. Subspaces carry an
//! orthonormal basis (possibly empty) and every rank decision goes through a
//! [`Tolerance`].

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const DEFAULT_EPS: f64 = 1e-9;

/// Absolute tolerance (Frobenius / l2) for every numerical verdict.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    eps: f64,
}

impl Tolerance {
    pub fn new(eps: f64) -> Result<Self> {
        if eps.is_finite() && eps > 0.0 {
            Ok(Self { eps })
        } else {
            Err(Error::InvalidTolerance(eps))
        }
    }

    #[inline]
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Singular values at or below this are treated as zero in an ambient
    /// space of dimension `dim`.
    #[inline]
    pub fn rank_cutoff(&self, dim: usize) -> f64 {
        self.eps * (dim.max(1) as f64).sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { eps: self.eps * factor }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { eps: DEFAULT_EPS }
    }
}

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Kronecker product of a list, left to right. The empty product is `[1]`.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    factors
        .into_iter()
        .fold(identity(1), |acc, f| kron(&acc, f))
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

pub fn idempotency_residual(m: &CMatrix) -> f64 {
    (m * m - m).norm()
}

pub fn unitarity_residual(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    (u.adjoint() * u - identity(u.nrows())).norm()
}

pub fn is_projector(p: &CMatrix, tol: Tolerance) -> bool {
    p.is_square()
        && is_finite(p)
        && hermiticity_residual(p) <= tol.eps()
        && idempotency_residual(p) <= tol.eps()
}

pub fn is_unitary(u: &CMatrix, tol: Tolerance) -> bool {
    unitarity_residual(u) <= tol.eps()
}

/// Rank-one projector `|v⟩⟨v|` for a unit vector.
pub fn ket_bra(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// `⟨v|M|v⟩`.
pub fn expectation(m: &CMatrix, v: &CVector) -> C64 {
    v.dotc(&(m * v))
}

/// Orthonormal basis of the column space of `p`, which must be a projector.
pub fn image(p: &CMatrix, tol: Tolerance) -> Result<Subspace> {
    if !p.is_square() {
        return Err(Error::DimensionMismatch {
            expected: p.nrows(),
            found: p.ncols(),
        });
    }
    let herm = hermiticity_residual(p);
    let idem = idempotency_residual(p);
    if herm > tol.eps() || idem > tol.eps() || !is_finite(p) {
        return Err(Error::NotAProjector {
            hermiticity: herm,
            idempotency: idem,
        });
    }
    let dim = p.nrows();
    if dim == 0 {
        return Ok(Subspace::zero(0));
    }
    let sym = (p + p.adjoint()) * re(0.5);
    let eig = SymmetricEigen::new(sym);
    let cols: Vec<CVector> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &lambda)| lambda > 0.5)
        .map(|(i, _)| eig.eigenvectors.column(i).into_owned())
        .collect();
    Ok(Subspace::from_orthonormal_columns(dim, &cols))
}

/// Subspace spanned by a finite family of orthonormal columns.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient_dim: usize,
    basis: CMatrix,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: identity(ambient_dim),
        }
    }

    fn from_orthonormal_columns(ambient_dim: usize, cols: &[CVector]) -> Self {
        if cols.is_empty() {
            return Self::zero(ambient_dim);
        }
        Self {
            ambient_dim,
            basis: CMatrix::from_columns(cols),
        }
    }

    /// Span of the columns of `vectors`, orthonormalised by SVD with the
    /// tolerance's rank cutoff.
    pub fn span(vectors: &CMatrix, tol: Tolerance) -> Self {
        let ambient = vectors.nrows();
        if vectors.ncols() == 0 || ambient == 0 {
            return Self::zero(ambient);
        }
        let svd = SVD::new(vectors.clone(), true, false);
        let u = svd.u.expect("left singular vectors requested");
        let cutoff = tol.rank_cutoff(ambient);
        let cols: Vec<CVector> = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > cutoff)
            .map(|(i, _)| u.column(i).into_owned())
            .collect();
        Self::from_orthonormal_columns(ambient, &cols)
    }

    pub fn span_of(ambient_dim: usize, vectors: &[CVector], tol: Tolerance) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient_dim);
        }
        Self::span(&CMatrix::from_columns(vectors), tol)
    }

    /// Span of the union of several subspaces of the same ambient space.
    pub fn sum(spaces: &[Subspace], tol: Tolerance) -> Result<Self> {
        let ambient = match spaces.first() {
            Some(s) => s.ambient_dim,
            None => return Err(Error::EmptyInput("subspace sum")),
        };
        let mut cols = Vec::new();
        for s in spaces {
            if s.ambient_dim != ambient {
                return Err(Error::DimensionMismatch {
                    expected: ambient,
                    found: s.ambient_dim,
                });
            }
            cols.extend(s.basis.column_iter().map(|c| c.into_owned()));
        }
        Ok(Self::span_of(ambient, &cols, tol))
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn basis_vector(&self, i: usize) -> CVector {
        self.basis.column(i).into_owned()
    }

    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    /// Component of `v` in the subspace.
    pub fn project(&self, v: &CVector) -> CVector {
        &self.basis * (self.basis.adjoint() * v)
    }

    /// `‖v − Πv‖`.
    pub fn distance(&self, v: &CVector) -> f64 {
        (v - self.project(v)).norm()
    }

    pub fn contains(&self, v: &CVector, tol: Tolerance) -> bool {
        self.distance(v) <= tol.eps()
    }

    /// Same subspace, compared through the projectors.
    pub fn same_as(&self, other: &Subspace, tol: Tolerance) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.dim() == other.dim()
            && (self.projector() - other.projector()).norm() <= tol.eps()
    }

    /// Largest deviation from orthonormality of the stored basis.
    pub fn orthonormality_residual(&self) -> f64 {
        (self.basis.adjoint() * &self.basis - identity(self.dim())).norm()
    }
}

/// Intersection of subspaces sharing an ambient space.
///
/// Folds left to right: the current basis `B` is pushed through the
/// complement of the next space and the right singular vectors of
/// `(I − P)B` below the rank cutoff give the surviving directions.
pub fn intersect(spaces: &[Subspace], tol: Tolerance) -> Result<Subspace> {
    let first = spaces.first().ok_or(Error::EmptyInput("intersection"))?;
    let ambient = first.ambient_dim;
    for s in spaces {
        if s.ambient_dim != ambient {
            return Err(Error::DimensionMismatch {
                expected: ambient,
                found: s.ambient_dim,
            });
        }
    }
    let cutoff = tol.rank_cutoff(ambient);
    let mut current = first.clone();
    for next in &spaces[1..] {
        if current.is_zero() {
            break;
        }
        if next.dim() == ambient {
            continue;
        }
        let b = &current.basis;
        let residual = b - &next.basis * (next.basis.adjoint() * b);
        // b has orthonormal columns so k ≤ ambient and V† is k × k.
        let svd = SVD::new(residual, false, true);
        let v_t = svd.v_t.expect("right singular vectors requested");
        let mut keep: Vec<CVector> = Vec::new();
        for (i, &s) in svd.singular_values.iter().enumerate() {
            if s <= cutoff {
                let coeffs = v_t.row(i).adjoint();
                keep.push(b * coeffs);
            }
        }
        current = Subspace::span_of(ambient, &keep, tol);
    }
    Ok(current)
}

/// Bipartite pure state on `C^dim_a ⊗ C^dim_b`, index `a * dim_b + b`.
#[derive(Clone, Debug)]
pub struct StateVector {
    dim_a: usize,
    dim_b: usize,
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(dim_a: usize, dim_b: usize, amplitudes: CVector, tol: Tolerance) -> Result<Self> {
        if amplitudes.len() != dim_a * dim_b {
            return Err(Error::DimensionMismatch {
                expected: dim_a * dim_b,
                found: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > tol.eps() {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            dim_a,
            dim_b,
            amplitudes,
        })
    }

    /// Rescales to unit norm; fails only on the zero vector.
    pub fn normalized(dim_a: usize, dim_b: usize, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Self::new(dim_a, dim_b, amplitudes.unscale(norm), Tolerance::default())
    }

    pub fn product(a: &CVector, b: &CVector) -> Result<Self> {
        let amps = a.kronecker(b);
        Self::normalized(a.len(), b.len(), amps)
    }

    #[inline]
    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    #[inline]
    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    /// Amplitudes reshaped into a `dim_a × dim_b` coefficient matrix.
    pub fn coefficient_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.dim_a, self.dim_b, |a, b| {
            self.amplitudes[a * self.dim_b + b]
        })
    }

    pub fn expectation(&self, op: &CMatrix) -> C64 {
        expectation(op, &self.amplitudes)
    }

    /// `(U_A ⊗ U_B)|ψ⟩`.
    pub fn apply_local(&self, u_a: &CMatrix, u_b: &CMatrix) -> Result<Self> {
        if u_a.nrows() != self.dim_a || u_b.nrows() != self.dim_b {
            return Err(Error::DimensionMismatch {
                expected: self.dim_a * self.dim_b,
                found: u_a.nrows() * u_b.nrows(),
            });
        }
        let m = u_a * self.coefficient_matrix() * u_b.transpose();
        Ok(Self {
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            amplitudes: flatten(&m),
        })
    }
}

/// Row-major flattening of a coefficient matrix back into a state vector.
pub fn flatten(m: &CMatrix) -> CVector {
    let (ra, cb) = m.shape();
    CVector::from_fn(ra * cb, |k, _| m[(k / cb, k % cb)])
}

/// Schmidt decomposition `Σ σ_i |u_i⟩ ⊗ |v_i⟩`, values in descending order.
#[derive(Clone, Debug)]
pub struct SchmidtData {
    pub values: Vec<f64>,
    /// `dim_a × rank`, orthonormal columns.
    pub left: CMatrix,
    /// `dim_b × rank`, orthonormal columns.
    pub right: CMatrix,
}

impl SchmidtData {
    pub fn rank(&self) -> usize {
        self.values.len()
    }

    pub fn reconstruct(&self) -> CVector {
        let mut m = zeros(self.left.nrows(), self.right.nrows());
        for (i, &s) in self.values.iter().enumerate() {
            m += self.left.column(i) * self.right.column(i).transpose() * re(s);
        }
        flatten(&m)
    }
}

pub fn schmidt(psi: &StateVector, tol: Tolerance) -> SchmidtData {
    let m = psi.coefficient_matrix();
    let svd = SVD::new(m, true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tol.eps())
        .collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let left_cols: Vec<CVector> = order.iter().map(|&i| u.column(i).into_owned()).collect();
    // M = Σ σ u v†, so the B-side mode is the row of V† read as a column.
    let right_cols: Vec<CVector> = order.iter().map(|&i| v_t.row(i).transpose()).collect();
    let (left, right) = if values.is_empty() {
        (zeros(psi.dim_a(), 0), zeros(psi.dim_b(), 0))
    } else {
        (
            CMatrix::from_columns(&left_cols),
            CMatrix::from_columns(&right_cols),
        )
    };
    SchmidtData {
        values,
        left,
        right,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn diag(entries: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(
            entries.len(),
            entries.iter().map(|&x| re(x)),
        ))
    }

    fn e(dim: usize, i: usize) -> CVector {
        let mut v = CVector::zeros(dim);
        v[i] = re(1.0);
        v
    }

    fn sigma_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[re(0.0), re(1.0), re(1.0), re(0.0)])
    }

    #[test]
    fn kron_identity_and_diagonal() {
        assert_eq!(kron(&identity(2), &identity(2)), identity(4));
        assert_eq!(
            kron(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0])),
            diag(&[0.0, 1.0, 0.0, 0.0])
        );
    }

    #[test]
    fn xx_stabilises_bell_state() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = CVector::from_vec(vec![re(h), re(0.0), re(0.0), re(h)]);
        let out = kron(&sigma_x(), &sigma_x()) * &bell;
        assert_abs_diff_eq!((out - bell).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn image_of_diagonal_and_zero() {
        let tol = Tolerance::default();
        let s = image(&diag(&[1.0, 1.0, 0.0, 0.0]), tol).unwrap();
        let expected = Subspace::span_of(4, &[e(4, 0), e(4, 1)], tol);
        assert!(s.same_as(&expected, tol));
        assert!(image(&zeros(3, 3), tol).unwrap().is_zero());
    }

    #[test]
    fn image_of_plus_projector() {
        let tol = Tolerance::default();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = CVector::from_vec(vec![re(h), re(h)]);
        let s = image(&ket_bra(&plus), tol).unwrap();
        assert_eq!(s.dim(), 1);
        assert_abs_diff_eq!(s.distance(&plus), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn image_rejects_non_projector() {
        let err = image(&diag(&[0.5, 1.0]), Tolerance::default()).unwrap_err();
        assert!(matches!(err, Error::NotAProjector { .. }));
        let err = image(&sigma_x(), Tolerance::default()).unwrap_err();
        assert!(matches!(err, Error::NotAProjector { .. }));
    }

    #[test]
    fn intersect_coordinate_subspaces() {
        let tol = Tolerance::default();
        let s12 = Subspace::span_of(3, &[e(3, 0), e(3, 1)], tol);
        let s23 = Subspace::span_of(3, &[e(3, 1), e(3, 2)], tol);
        let s2 = Subspace::span_of(3, &[e(3, 1)], tol);
        assert!(intersect(&[s12.clone(), s23], tol).unwrap().same_as(&s2, tol));
        assert!(intersect(&[Subspace::full(3), s12.clone()], tol)
            .unwrap()
            .same_as(&s12, tol));
        let s1 = Subspace::span_of(3, &[e(3, 0)], tol);
        assert!(intersect(&[s1, s2], tol).unwrap().is_zero());
    }

    #[test]
    fn intersect_rejects_mixed_ambient() {
        let err = intersect(&[Subspace::full(2), Subspace::full(3)], Tolerance::default());
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
        assert!(intersect(&[], Tolerance::default()).is_err());
    }

    #[test]
    fn schmidt_of_bell_product_and_double_bell() {
        let tol = Tolerance::default();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::new(
            2,
            2,
            CVector::from_vec(vec![re(h), re(0.0), re(0.0), re(h)]),
            tol,
        )
        .unwrap();
        let sd = schmidt(&bell, tol);
        assert_eq!(sd.rank(), 2);
        for v in &sd.values {
            assert_abs_diff_eq!(*v, h, epsilon = 1e-12);
        }

        let prod = StateVector::product(&e(2, 0), &e(2, 0)).unwrap();
        let sd = schmidt(&prod, tol);
        assert_eq!(sd.values.len(), 1);
        assert_abs_diff_eq!(sd.values[0], 1.0, epsilon = 1e-12);

        // Two EPR pairs with A = (A1 A2), B = (B1 B2): Σ_k |k⟩|k⟩ / 2.
        let mut amps = CVector::zeros(16);
        for k in 0..4 {
            amps[k * 4 + k] = re(0.5);
        }
        let sd = schmidt(&StateVector::new(4, 4, amps, tol).unwrap(), tol);
        assert_eq!(sd.rank(), 4);
        for v in &sd.values {
            assert_abs_diff_eq!(*v, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn schmidt_reconstructs_complex_state() {
        let tol = Tolerance::default();
        let amps = CVector::from_vec(vec![
            c(0.1, 0.2),
            c(-0.3, 0.1),
            c(0.0, 0.4),
            c(0.5, -0.2),
            c(0.2, 0.2),
            c(-0.1, 0.0),
        ]);
        let psi = StateVector::normalized(2, 3, amps).unwrap();
        let sd = schmidt(&psi, tol);
        assert!((sd.reconstruct() - psi.amplitudes()).norm() < 1e-12);
        let total: f64 = sd.values.iter().map(|s| s * s).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn tolerance_must_be_positive() {
        assert!(Tolerance::new(0.0).is_err());
        assert!(Tolerance::new(f64::NAN).is_err());
        assert_eq!(Tolerance::default().eps(), 1e-9);
    }

    #[test]
    fn state_rejects_bad_norm() {
        let v = CVector::from_vec(vec![re(1.0), re(1.0)]);
        assert!(matches!(
            StateVector::new(1, 2, v, Tolerance::default()),
            Err(Error::NotNormalized(_))
        ));
    }
}
