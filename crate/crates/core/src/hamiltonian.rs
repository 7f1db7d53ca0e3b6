//! Grouped-term Hamiltonians H = Σ_i h_i H_i with h_i > 0.
//!
//! Each term carries a strictly positive weight h_i and a unit-scale
//! Hermitian generator H_i; weights are stored separately so that
//! λ = Σ h_i, Λ = max h_i, and sampling probabilities read directly off
//! the weights. Terms built from Pauli strings keep the summand list so
//! the grouped-commuting assumption can be checked.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_expm, max_norm_diff, CMatrix, HermitianMatrix, UnitaryMatrix};
use crate::pauli::{weighted_sum, PauliOp, PauliString};


/// One weighted Hermitian term h_i · H_i.
#[derive(Debug, Clone)]
pub struct HermitianTerm {
    label: String,
    weight: f64,
    operator: HermitianMatrix,
    pauli_summands: Option<Vec<PauliString>>,
}

impl HermitianTerm {
    pub fn new(label: impl Into<String>, weight: f64, operator: HermitianMatrix) -> Result<Self> {
        if !(weight > 0.0) {
            return Err(Error::NonPositiveWeight { value: weight });
        }
        Ok(Self {
            label: label.into(),
            weight,
            operator,
            pauli_summands: None,
        })
    }

    /// Construct from unit-coefficient Pauli summands. The summands must
    /// mutually commute (grouped-commuting-terms assumption) and their sum
    /// is the unit-scale generator.
    pub fn from_pauli_summands(
        label: impl Into<String>,
        weight: f64,
        n_qubits: usize,
        summands: Vec<PauliString>,
    ) -> Result<Self> {
        if !(weight > 0.0) {
            return Err(Error::NonPositiveWeight { value: weight });
        }
        for (i, a) in summands.iter().enumerate() {
            for b in summands.iter().skip(i + 1) {
                if !a.commutes_with(b) {
                    return Err(Error::Config(format!(
                        "grouped summands must commute: {a} vs {b}"
                    )));
                }
            }
        }
        let pairs: Vec<(PauliString, f64)> =
            summands.iter().map(|p| (p.clone(), 1.0)).collect();
        let m = weighted_sum(n_qubits, &pairs)?;
        let operator = HermitianMatrix::new(m)?;
        Ok(Self {
            label: label.into(),
            weight,
            operator,
            pauli_summands: Some(summands),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn operator(&self) -> &HermitianMatrix {
        &self.operator
    }

    pub fn pauli_summands(&self) -> Option<&[PauliString]> {
        self.pauli_summands.as_deref()
    }
}

/// H = Σ_i h_i H_i as an ordered list of grouped terms.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    terms: Vec<HermitianTerm>,
    dim: usize,
}

impl Hamiltonian {
    pub fn new(terms: Vec<HermitianTerm>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidParams("a Hamiltonian needs at least one term".into()))?;
        let dim = first.operator().dim();
        for t in &terms {
            if t.operator().dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: t.operator().dim(),
                    right: dim,
                });
            }
        }
        Ok(Self { terms, dim })
    }

    pub fn terms(&self) -> &[HermitianTerm] {
        &self.terms
    }

    /// Number of grouped terms L.
    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// λ = Σ_i h_i.
    pub fn lambda(&self) -> f64 {
        self.terms.iter().map(|t| t.weight()).sum()
    }

    /// Λ = max_i h_i.
    pub fn big_lambda(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.weight())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn weights(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.weight()).collect()
    }

    /// Dense Σ_i h_i · H_i.
    pub fn total_matrix(&self) -> Result<HermitianMatrix> {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for t in &self.terms {
            m += t.operator().matrix() * num_complex::Complex64::new(t.weight(), 0.0);
        }
        HermitianMatrix::new(m)
    }

    /// e^{-i·theta·H_i} for the unit-scale generator of term `i` (0-based).
    /// The caller supplies the full angle, e.g. tλ/N for pool operators.
    pub fn term_unitary(&self, i: usize, theta: f64) -> Result<UnitaryMatrix> {
        let term = self
            .terms
            .get(i)
            .ok_or(Error::TermIndexOutOfRange {
                index: i,
                count: self.terms.len(),
            })?;
        hermitian_expm(term.operator(), theta)
    }

    /// Number of qubits if the dimension is a power of two.
    pub fn n_qubits(&self) -> Option<usize> {
        if self.dim.is_power_of_two() {
            Some(self.dim.trailing_zeros() as usize)
        } else {
            None
        }
    }
}

/// 1D transverse-field Ising chain on `n_qubits` with open boundaries,
/// grouped as L = 2 terms: all ZZ couplings (weight J) and all transverse
/// fields (weight h).
pub fn build_tfim(n_qubits: usize, j: f64, h: f64) -> Result<Hamiltonian> {
    if !(2..=12).contains(&n_qubits) {
        return Err(Error::QubitCountOutOfRange {
            n: n_qubits,
            min: 2,
            max: 12,
        });
    }
    if !(j > 0.0) {
        return Err(Error::NonPositiveWeight { value: j });
    }
    if !(h > 0.0) {
        return Err(Error::NonPositiveWeight { value: h });
    }
    let zz: Vec<PauliString> = (0..n_qubits - 1)
        .map(|i| PauliString::two_site(n_qubits, i, i + 1, PauliOp::Z))
        .collect();
    let x: Vec<PauliString> = (0..n_qubits)
        .map(|i| PauliString::single(n_qubits, i, PauliOp::X))
        .collect();
    let term_zz = HermitianTerm::from_pauli_summands("ZZ", j, n_qubits, zz)?;
    let term_x = HermitianTerm::from_pauli_summands("X", h, n_qubits, x)?;
    Hamiltonian::new(vec![term_zz, term_x])
}

/// Check that a term built from commuting summands exponentiates as the
/// ordered product of summand exponentials.
pub fn summand_product_deviation(term: &HermitianTerm, theta: f64) -> Result<f64> {
    let summands = term.pauli_summands().ok_or_else(|| {
        Error::InvalidParams("term has no Pauli summand decomposition".into())
    })?;
    let whole = hermitian_expm(term.operator(), theta)?;
    let dim = term.operator().dim();
    let mut prod = UnitaryMatrix::identity(dim);
    for p in summands {
        let factor = hermitian_expm(&HermitianMatrix::new(p.matrix())?, theta)?;
        prod = prod.compose(&factor)?;
    }
    Ok(max_norm_diff(whole.matrix(), prod.matrix()))
}
