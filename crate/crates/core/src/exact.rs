//! Ground-truth time evolution and reproducible random initial states.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::linalg::{
    conjugate_observable, expectation, hermitian_expm, CVector, HermitianMatrix, StateVector,
};
use crate::pauli::{weighted_sum, PauliOp, PauliString};

/// A labeled Hermitian observable.
#[derive(Debug, Clone)]
pub struct ObservableSpec {
    label: String,
    operator: HermitianMatrix,
}

impl ObservableSpec {
    pub fn new(label: impl Into<String>, operator: HermitianMatrix) -> Self {
        Self {
            label: label.into(),
            operator,
        }
    }

    /// Q = Σ_i Z_i on `n_qubits`.
    pub fn sum_z(n_qubits: usize) -> Result<Self> {
        let terms: Vec<(PauliString, f64)> = (0..n_qubits)
            .map(|i| (PauliString::single(n_qubits, i, PauliOp::Z), 1.0))
            .collect();
        let m = weighted_sum(n_qubits, &terms)?;
        Ok(Self::new("sum_z", HermitianMatrix::new(m)?))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn operator(&self) -> &HermitianMatrix {
        &self.operator
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }
}

/// <psi| e^{iHt} Q e^{-iHt} |psi> via spectral decomposition of the full
/// Hamiltonian matrix.
pub fn exact_expectation(
    h: &Hamiltonian,
    q: &ObservableSpec,
    psi: &StateVector,
    t: f64,
) -> Result<f64> {
    if h.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: h.dim(),
            right: q.dim(),
        });
    }
    let u = hermitian_expm(&h.total_matrix()?, t)?;
    let evolved = conjugate_observable(&u, q.operator())?;
    expectation(&evolved, psi)
}

/// Time-evolved state e^{-iHt}|psi>.
pub fn evolve(h: &Hamiltonian, psi: &StateVector, t: f64) -> Result<StateVector> {
    let u = hermitian_expm(&h.total_matrix()?, t)?;
    u.apply(psi)
}

/// Haar-random state on `n_qubits`: amplitudes drawn as independent
/// standard complex Gaussians from a counter-based stream cipher PRNG,
/// then 2-normalized. The same seed always yields the same state within
/// this implementation; cross-implementation bit-reproducibility is not
/// promised.
pub fn random_state(n_qubits: usize, seed: u64) -> Result<StateVector> {
    if !(1..=12).contains(&n_qubits) {
        return Err(Error::QubitCountOutOfRange {
            n: n_qubits,
            min: 1,
            max: 12,
        });
    }
    let dim = 1usize << n_qubits;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = CVector::from_fn(dim, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, im)
    });
    StateVector::normalized(v)
}
