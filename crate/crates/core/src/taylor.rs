//! Truncated matrix-valued Taylor polynomials in the evolution time.
//!
//! This is a validation aid: it reaches the expansion coefficients of
//! conjugated observables through plain truncated power-series arithmetic
//! (matrix exponential series, truncated products), with no commutator or
//! word machinery involved, so it can serve as an independent oracle for
//! the formal expansion code.

use num_complex::Complex64;

use crate::error::Result;
use crate::exact::ObservableSpec;
use crate::hamiltonian::Hamiltonian;
use crate::linalg::CMatrix;

/// Matrix polynomial Σ_k coeffs[k] t^k, truncated at a fixed order.
#[derive(Debug, Clone)]
pub struct MatrixPoly {
    coeffs: Vec<CMatrix>,
}

impl MatrixPoly {
    pub fn constant(m: CMatrix, order: usize) -> Self {
        let dim = m.nrows();
        let mut coeffs = vec![CMatrix::zeros(dim, dim); order + 1];
        coeffs[0] = m;
        Self { coeffs }
    }

    /// Series of e^{scale·t·A} truncated at the polynomial's order.
    pub fn exponential(a: &CMatrix, scale: Complex64, order: usize) -> Self {
        let dim = a.nrows();
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut power = CMatrix::identity(dim, dim);
        let mut fact = 1.0;
        for k in 0..=order {
            if k > 0 {
                power = (a * &power) * scale;
                fact *= k as f64;
            }
            coeffs.push(&power / Complex64::new(fact, 0.0));
        }
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &CMatrix {
        &self.coeffs[k]
    }

    /// Truncated product self · other.
    pub fn mul(&self, other: &MatrixPoly) -> Self {
        let order = self.order().min(other.order());
        let dim = self.coeffs[0].nrows();
        let mut coeffs = vec![CMatrix::zeros(dim, dim); order + 1];
        for k in 0..=order {
            for j in 0..=k {
                coeffs[k] += &self.coeffs[j] * &other.coeffs[k - j];
            }
        }
        Self { coeffs }
    }

    /// Coefficient-wise adjoint; equals the adjoint of the series for
    /// real t.
    pub fn adjoint(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.adjoint()).collect(),
        }
    }
}

/// Taylor coefficients of U†QU where U = V_{s_0}·V_{s_1}·...·V_{s_{m-1}}
/// (slot 0 leftmost, its conjugation acting next to Q) and
/// V_a = e^{-i·angle_scale·t·H_a} over unit-scale generators.
pub fn conjugation_taylor(
    h: &Hamiltonian,
    q: &ObservableSpec,
    slots: &[usize],
    angle_scale: f64,
    order: usize,
) -> Result<Vec<CMatrix>> {
    let dim = h.dim();
    let mut u = MatrixPoly::constant(CMatrix::identity(dim, dim), order);
    let scale = Complex64::new(0.0, -angle_scale);
    for &s in slots {
        let factor = MatrixPoly::exponential(h.terms()[s].operator().matrix(), scale, order);
        u = u.mul(&factor);
    }
    let q_poly = MatrixPoly::constant(q.operator().matrix().clone(), order);
    let conj = u.adjoint().mul(&q_poly).mul(&u);
    Ok((0..=order).map(|k| conj.coeff(k).clone()).collect())
}

/// Taylor coefficients of the target e^{iτtH} Q e^{-iτtH}:
/// T_k = (iτ)^k / k! · [H, [H, ..., [H, Q]...]] (k nested commutators of
/// the full weighted matrix).
pub fn target_taylor(
    h: &Hamiltonian,
    q: &ObservableSpec,
    tau_ratio: f64,
    order: usize,
) -> Result<Vec<CMatrix>> {
    let hm = h.total_matrix()?.into_matrix();
    let mut out = Vec::with_capacity(order + 1);
    let mut nested = q.operator().matrix().clone();
    let mut fact = 1.0;
    for k in 0..=order {
        if k > 0 {
            nested = &hm * &nested - &nested * &hm;
            fact *= k as f64;
        }
        let coeff = Complex64::new(0.0, tau_ratio).powu(k as u32) / Complex64::new(fact, 0.0);
        out.push(&nested * coeff);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::build_tfim;
    use crate::linalg::{hermitian_expm, max_norm_diff};

    #[test]
    fn exponential_series_matches_dense_exponential_at_small_t() {
        let h = build_tfim(2, 1.0, 0.4).unwrap();
        let a = h.terms()[1].operator();
        let order = 8;
        let poly = MatrixPoly::exponential(a.matrix(), Complex64::new(0.0, -0.9), order);
        let t = 0.05;
        let mut acc = CMatrix::zeros(4, 4);
        for k in (0..=order).rev() {
            acc = acc * Complex64::new(t, 0.0) + poly.coeff(k);
        }
        let exact = hermitian_expm(a, 0.9 * t).unwrap();
        assert!(max_norm_diff(&acc, exact.matrix()) <= 1e-12);
    }

    #[test]
    fn single_slot_conjugation_matches_target_with_one_term() {
        // for a single-term Hamiltonian the slot conjugation and the target
        // conjugation are the same function of t up to weight scaling
        let t1 = crate::hamiltonian::HermitianTerm::from_pauli_summands(
            "ZZ",
            0.6,
            2,
            vec![crate::pauli::PauliString::parse("ZZ").unwrap()],
        )
        .unwrap();
        let h = crate::hamiltonian::Hamiltonian::new(vec![t1]).unwrap();
        let q = crate::exact::ObservableSpec::sum_z(2).unwrap();
        // angle for the slot equals weight · τ with τ = 1
        let circuit = conjugation_taylor(&h, &q, &[0], 0.6, 4).unwrap();
        let target = target_taylor(&h, &q, 1.0, 4).unwrap();
        for k in 0..=4 {
            assert!(
                max_norm_diff(&circuit[k], &target[k]) <= 1e-12,
                "order {k}"
            );
        }
    }
}
