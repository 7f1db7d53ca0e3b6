//! Dense complex linear algebra: Hermitian/unitary matrix wrappers,
//! state vectors, and Hermitian exponentials via spectral decomposition.
//!
//! Everything here is a pure value: types are immutable after construction
//! and safe to share across threads. Dimensions are capped at 2^12 so dense
//! storage and eigendecomposition stay tractable; larger requests are
//! rejected rather than silently slow.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::policy::policy;

/// Dense complex matrix.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex vector.
pub type CVector = DVector<Complex64>;

/// Largest supported Hilbert-space dimension (12 qubits).
pub const DIM_CAP: usize = 4096;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const C_I: Complex64 = Complex64::new(0.0, 1.0);

/// Max-norm of M - M†.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let adj = m.adjoint();
    (m - adj).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Frobenius norm of U†U - I.
pub fn unitarity_deviation(m: &CMatrix) -> f64 {
    let d = m.nrows();
    (m.adjoint() * m - CMatrix::identity(d, d)).norm()
}

/// Elementwise max-norm of the difference of two matrices.
pub fn max_norm_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn check_square_dim(m: &CMatrix) -> Result<usize> {
    let dim = m.nrows();
    if m.ncols() != dim {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: m.ncols(),
        });
    }
    if dim == 0 || dim > DIM_CAP {
        return Err(Error::DimensionCap { dim, cap: DIM_CAP });
    }
    Ok(dim)
}

/// A square complex matrix validated to be Hermitian within the structural
/// tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    inner: CMatrix,
}

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square_dim(&m)?;
        let dev = hermiticity_deviation(&m);
        let tol = policy().structural_tol;
        if dev > tol {
            return Err(Error::NotHermitian {
                deviation: dev,
                tol,
            });
        }
        Ok(Self { inner: m })
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> CMatrix {
        self.inner
    }

    /// Spectral decomposition: real eigenvalues and a unitary eigenbasis.
    pub fn eigen(&self) -> (Vec<f64>, CMatrix) {
        let eig = self.inner.clone().symmetric_eigen();
        (eig.eigenvalues.as_slice().to_vec(), eig.eigenvectors)
    }

    /// Spectral norm (largest |eigenvalue|).
    pub fn spectral_norm(&self) -> f64 {
        let (vals, _) = self.eigen();
        vals.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// A square complex matrix validated to be unitary within the structural
/// tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    inner: CMatrix,
}

impl UnitaryMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square_dim(&m)?;
        let dev = unitarity_deviation(&m);
        let tol = policy().structural_tol;
        if dev > tol {
            return Err(Error::NotUnitary {
                deviation: dev,
                tol,
            });
        }
        Ok(Self { inner: m })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> CMatrix {
        self.inner
    }

    /// Product self · other.
    pub fn compose(&self, other: &UnitaryMatrix) -> Result<UnitaryMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(UnitaryMatrix {
            inner: &self.inner * &other.inner,
        })
    }

    /// Apply to a state: U|psi>.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if self.dim() != psi.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: psi.dim(),
            });
        }
        Ok(StateVector {
            inner: &self.inner * psi.vector(),
        })
    }
}

/// A normalized complex state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    inner: CVector,
}

impl StateVector {
    pub fn new(v: CVector) -> Result<Self> {
        let dim = v.len();
        if dim == 0 || dim > DIM_CAP {
            return Err(Error::DimensionCap { dim, cap: DIM_CAP });
        }
        let dev = (v.norm() - 1.0).abs();
        let tol = policy().structural_tol;
        if dev > tol {
            return Err(Error::NotNormalized {
                deviation: dev,
                tol,
            });
        }
        Ok(Self { inner: v })
    }

    /// Normalize an arbitrary nonzero vector.
    pub fn normalized(mut v: CVector) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 {
            return Err(Error::NotNormalized {
                deviation: 1.0,
                tol: policy().structural_tol,
            });
        }
        v /= Complex64::new(n, 0.0);
        Ok(Self { inner: v })
    }

    /// Computational basis state |index>.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        let mut v = CVector::zeros(dim);
        v[index] = C_ONE;
        Self::new(v)
    }

    pub fn dim(&self) -> usize {
        self.inner.len()
    }

    pub fn vector(&self) -> &CVector {
        &self.inner
    }
}

/// e^{-i·theta·A} for Hermitian A, computed via spectral decomposition.
///
/// Exact (to round-off) for Hermitian generators at these dimensions,
/// which gives a uniform accuracy contract across the whole library.
pub fn hermitian_expm(a: &HermitianMatrix, theta: f64) -> Result<UnitaryMatrix> {
    let (vals, vecs) = a.eigen();
    let phases = CVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| Complex64::from_polar(1.0, -theta * v)),
    );
    let d = CMatrix::from_diagonal(&phases);
    let u = &vecs * d * vecs.adjoint();
    UnitaryMatrix::new(u)
}

/// U†QU. The result is re-validated as Hermitian.
pub fn conjugate_observable(u: &UnitaryMatrix, q: &HermitianMatrix) -> Result<HermitianMatrix> {
    if u.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: u.dim(),
            right: q.dim(),
        });
    }
    let m = u.matrix().adjoint() * q.matrix() * u.matrix();
    HermitianMatrix::new(m)
}

/// <psi|Q|psi>. The imaginary residue of the raw inner product must stay
/// below the policy tolerance; it is checked and discarded.
pub fn expectation(q: &HermitianMatrix, psi: &StateVector) -> Result<f64> {
    if q.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            left: q.dim(),
            right: psi.dim(),
        });
    }
    let qpsi = q.matrix() * psi.vector();
    let raw = psi.vector().dotc(&qpsi);
    let tol = policy().imag_tol;
    if raw.im.abs() > tol {
        return Err(Error::ImaginaryResidue {
            residue: raw.im.abs(),
            tol,
        });
    }
    Ok(raw.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_z() -> HermitianMatrix {
        HermitianMatrix::new(CMatrix::from_row_slice(
            2,
            2,
            &[C_ONE, C_ZERO, C_ZERO, -C_ONE],
        ))
        .unwrap()
    }

    fn pauli_x() -> HermitianMatrix {
        HermitianMatrix::new(CMatrix::from_row_slice(
            2,
            2,
            &[C_ZERO, C_ONE, C_ONE, C_ZERO],
        ))
        .unwrap()
    }

    fn random_hermitian(dim: usize, seed: u64) -> HermitianMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let raw = CMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let herm = (&raw + raw.adjoint()) * Complex64::new(0.5, 0.0);
        HermitianMatrix::new(herm).unwrap()
    }

    fn random_state(dim: usize, seed: u64) -> StateVector {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let v = CVector::from_fn(dim, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        StateVector::normalized(v).unwrap()
    }

    #[test]
    fn expm_at_zero_is_identity() {
        let a = random_hermitian(8, 1);
        let u = hermitian_expm(&a, 0.0).unwrap();
        assert!(max_norm_diff(u.matrix(), &CMatrix::identity(8, 8)) <= 1e-12);
    }

    #[test]
    fn expm_of_z_is_diagonal_phases() {
        let theta = 0.37;
        let u = hermitian_expm(&pauli_z(), theta).unwrap();
        let expect = CMatrix::from_diagonal(&CVector::from_vec(vec![
            Complex64::from_polar(1.0, -theta),
            Complex64::from_polar(1.0, theta),
        ]));
        assert!(max_norm_diff(u.matrix(), &expect) <= 1e-12);
    }

    #[test]
    fn expm_inverse_composition() {
        let a = random_hermitian(8, 2);
        let u = hermitian_expm(&a, 0.3).unwrap();
        assert!(unitarity_deviation(u.matrix()) <= 1e-12);
        let uinv = hermitian_expm(&a, -0.3).unwrap();
        let prod = uinv.compose(&u).unwrap();
        assert!(max_norm_diff(prod.matrix(), &CMatrix::identity(8, 8)) <= 1e-10);
    }

    #[test]
    fn expm_group_property() {
        let a = random_hermitian(6, 3);
        let (x, y) = (0.21, -0.55);
        let lhs = hermitian_expm(&a, x)
            .unwrap()
            .compose(&hermitian_expm(&a, y).unwrap())
            .unwrap();
        let rhs = hermitian_expm(&a, x + y).unwrap();
        assert!(max_norm_diff(lhs.matrix(), rhs.matrix()) <= 1e-10);
    }

    #[test]
    fn conjugation_identity_and_pauli() {
        let q = pauli_z();
        let id = UnitaryMatrix::identity(2);
        let same = conjugate_observable(&id, &q).unwrap();
        assert!(max_norm_diff(same.matrix(), q.matrix()) <= 1e-12);

        // X Z X = -Z
        let x = UnitaryMatrix::new(pauli_x().into_matrix()).unwrap();
        let flipped = conjugate_observable(&x, &q).unwrap();
        assert!(max_norm_diff(flipped.matrix(), &(-q.matrix().clone())) <= 1e-12);
    }

    #[test]
    fn conjugation_matches_naive_triple_product() {
        let a = random_hermitian(5, 4);
        let u = hermitian_expm(&a, 0.8).unwrap();
        let q = random_hermitian(5, 5);
        let got = conjugate_observable(&u, &q).unwrap();

        // brute-force triple product by explicit loops
        let d = 5;
        let mut naive = CMatrix::zeros(d, d);
        for r in 0..d {
            for c in 0..d {
                let mut acc = C_ZERO;
                for k in 0..d {
                    for l in 0..d {
                        acc += u.matrix()[(k, r)].conj() * q.matrix()[(k, l)] * u.matrix()[(l, c)];
                    }
                }
                naive[(r, c)] = acc;
            }
        }
        assert!(max_norm_diff(got.matrix(), &naive) <= 1e-12);
    }

    #[test]
    fn expectation_basics() {
        let dim = 4;
        let id = HermitianMatrix::new(CMatrix::identity(dim, dim)).unwrap();
        let psi = random_state(dim, 6);
        assert!((expectation(&id, &psi).unwrap() - 1.0).abs() <= 1e-12);

        let z = pauli_z();
        let zero = StateVector::basis(2, 0).unwrap();
        assert!((expectation(&z, &zero).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn expectation_matches_double_loop() {
        let q = random_hermitian(6, 7);
        let psi = random_state(6, 8);
        let got = expectation(&q, &psi).unwrap();
        let mut acc = C_ZERO;
        for r in 0..6 {
            for c in 0..6 {
                acc += psi.vector()[r].conj() * q.matrix()[(r, c)] * psi.vector()[c];
            }
        }
        assert!((got - acc.re).abs() <= 1e-12);
        assert!(acc.im.abs() <= 1e-10);
    }

    #[test]
    fn heisenberg_vs_schroedinger_expectation() {
        let a = random_hermitian(6, 9);
        let u = hermitian_expm(&a, 0.4).unwrap();
        let q = random_hermitian(6, 10);
        let psi = random_state(6, 11);
        let heis = expectation(&conjugate_observable(&u, &q).unwrap(), &psi).unwrap();
        let schr = expectation(&q, &u.apply(&psi).unwrap()).unwrap();
        assert!((heis - schr).abs() <= 1e-10);
    }

    #[test]
    fn rejects_non_hermitian_and_bad_dims() {
        let m = CMatrix::from_row_slice(2, 2, &[C_ONE, C_I, C_I, C_ONE]);
        assert!(matches!(
            HermitianMatrix::new(m),
            Err(Error::NotHermitian { .. })
        ));
        let z = pauli_z();
        let psi3 = StateVector::basis(4, 0).unwrap();
        assert!(matches!(
            expectation(&z, &psi3),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
