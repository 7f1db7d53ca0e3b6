//! First- and second-order Trotter product formulas with folding.
//!
//! Order 1 over one step of length τ applies e^{-i h_i H_i τ} for
//! i = 1..L; order 2 is the symmetric (Strang) splitting: a forward sweep
//! at τ/2 followed by a backward sweep at τ/2. Folding repeats the step N
//! times at τ = t/N. The expectation-value errors scale as O(t^2) and
//! O(t^3) respectively, which the test suite pins down by log-log slope.

use crate::error::{Error, Result};
use crate::exact::{exact_expectation, ObservableSpec};
use crate::hamiltonian::Hamiltonian;
use crate::linalg::{conjugate_observable, expectation, StateVector, UnitaryMatrix};

/// Formula order and fold count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormulaSpec {
    order: u8,
    folds: usize,
}

impl FormulaSpec {
    pub fn new(order: u8, folds: usize) -> Result<Self> {
        if order != 1 && order != 2 {
            return Err(Error::InvalidParams(format!(
                "product-formula order must be 1 or 2, got {order}"
            )));
        }
        if folds == 0 {
            return Err(Error::InvalidParams("fold count must be at least 1".into()));
        }
        Ok(Self { order, folds })
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn folds(&self) -> usize {
        self.folds
    }
}

/// The folded product-formula unitary for total evolution time t.
pub fn trotter_unitary(h: &Hamiltonian, spec: FormulaSpec, t: f64) -> Result<UnitaryMatrix> {
    let tau = t / spec.folds() as f64;
    let step = match spec.order() {
        1 => forward_sweep(h, tau)?,
        2 => {
            let half = forward_sweep(h, tau / 2.0)?;
            let back = backward_sweep(h, tau / 2.0)?;
            half.compose(&back)?
        }
        _ => unreachable!(),
    };
    let mut u = UnitaryMatrix::identity(h.dim());
    for _ in 0..spec.folds() {
        u = u.compose(&step)?;
    }
    Ok(u)
}

fn forward_sweep(h: &Hamiltonian, tau: f64) -> Result<UnitaryMatrix> {
    let mut u = UnitaryMatrix::identity(h.dim());
    for i in 0..h.n_terms() {
        let factor = h.term_unitary(i, h.terms()[i].weight() * tau)?;
        u = u.compose(&factor)?;
    }
    Ok(u)
}

fn backward_sweep(h: &Hamiltonian, tau: f64) -> Result<UnitaryMatrix> {
    let mut u = UnitaryMatrix::identity(h.dim());
    for i in (0..h.n_terms()).rev() {
        let factor = h.term_unitary(i, h.terms()[i].weight() * tau)?;
        u = u.compose(&factor)?;
    }
    Ok(u)
}

/// |<psi|V†QV|psi> - <Q(t)>_exact| for V = trotter_unitary.
pub fn formula_error(
    h: &Hamiltonian,
    q: &ObservableSpec,
    psi: &StateVector,
    spec: FormulaSpec,
    t: f64,
) -> Result<f64> {
    let v = trotter_unitary(h, spec, t)?;
    let approx = expectation(&conjugate_observable(&v, q.operator())?, psi)?;
    let exact = exact_expectation(h, q, psi, t)?;
    Ok((approx - exact).abs())
}
