//! Pauli strings and their dense matrix realizations.
//!
//! A Pauli string is a tensor product of single-qubit operators from
//! {I, X, Y, Z}, written as a fixed-length string such as "ZZIIII".
//! Qubit 0 is the leftmost character (most significant bit of the basis
//! index).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C_I, C_ONE, C_ZERO};

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

impl PauliOp {
    pub fn matrix(self) -> CMatrix {
        match self {
            PauliOp::I => CMatrix::identity(2, 2),
            PauliOp::X => CMatrix::from_row_slice(2, 2, &[C_ZERO, C_ONE, C_ONE, C_ZERO]),
            PauliOp::Y => CMatrix::from_row_slice(2, 2, &[C_ZERO, -C_I, C_I, C_ZERO]),
            PauliOp::Z => CMatrix::from_row_slice(2, 2, &[C_ONE, C_ZERO, C_ZERO, -C_ONE]),
        }
    }

    fn from_char(c: char) -> Result<Self> {
        match c {
            'I' | 'i' => Ok(PauliOp::I),
            'X' | 'x' => Ok(PauliOp::X),
            'Y' | 'y' => Ok(PauliOp::Y),
            'Z' | 'z' => Ok(PauliOp::Z),
            other => Err(Error::Config(format!("invalid Pauli character '{other}'"))),
        }
    }

    fn as_char(self) -> char {
        match self {
            PauliOp::I => 'I',
            PauliOp::X => 'X',
            PauliOp::Y => 'Y',
            PauliOp::Z => 'Z',
        }
    }
}

/// A tensor product of single-qubit Paulis over a fixed qubit count.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    ops: Vec<PauliOp>,
}

impl PauliString {
    pub fn new(ops: Vec<PauliOp>) -> Self {
        Self { ops }
    }

    /// Parse from a string like "ZZIIII".
    pub fn parse(s: &str) -> Result<Self> {
        let ops = s.chars().map(PauliOp::from_char).collect::<Result<_>>()?;
        Ok(Self { ops })
    }

    /// All-identity string on `n` qubits with `op` at `qubit`.
    pub fn single(n: usize, qubit: usize, op: PauliOp) -> Self {
        let mut ops = vec![PauliOp::I; n];
        ops[qubit] = op;
        Self { ops }
    }

    /// Identity string with `op` on two qubits.
    pub fn two_site(n: usize, a: usize, b: usize, op: PauliOp) -> Self {
        let mut ops = vec![PauliOp::I; n];
        ops[a] = op;
        ops[b] = op;
        Self { ops }
    }

    pub fn n_qubits(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[PauliOp] {
        &self.ops
    }

    /// Dense 2^n x 2^n matrix via Kronecker products, qubit 0 leftmost.
    pub fn matrix(&self) -> CMatrix {
        let mut m = CMatrix::from_row_slice(1, 1, &[C_ONE]);
        for op in &self.ops {
            m = m.kronecker(&op.matrix());
        }
        m
    }

    /// Two Pauli strings commute iff they anticommute on an even number
    /// of qubit positions (symplectic criterion).
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anticommuting = self
            .ops
            .iter()
            .zip(other.ops.iter())
            .filter(|(a, b)| **a != PauliOp::I && **b != PauliOp::I && a != b)
            .count();
        anticommuting % 2 == 0
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for op in &self.ops {
            write!(f, "{}", op.as_char())?;
        }
        Ok(())
    }
}

/// Dense sum of Pauli strings with real coefficients.
pub fn weighted_sum(n_qubits: usize, terms: &[(PauliString, f64)]) -> Result<CMatrix> {
    let dim = 1usize << n_qubits;
    let mut m = CMatrix::zeros(dim, dim);
    for (p, w) in terms {
        if p.n_qubits() != n_qubits {
            return Err(Error::DimensionMismatch {
                left: p.n_qubits(),
                right: n_qubits,
            });
        }
        m += p.matrix() * Complex64::new(*w, 0.0);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_norm_diff;

    #[test]
    fn parses_and_prints() {
        let p = PauliString::parse("ZzIx").unwrap();
        assert_eq!(p.to_string(), "ZZIX");
        assert_eq!(p.n_qubits(), 4);
    }

    #[test]
    fn kron_ordering_qubit0_is_msb() {
        // Z on qubit 0 of two: diag(+1,+1,-1,-1)
        let p = PauliString::single(2, 0, PauliOp::Z);
        let m = p.matrix();
        assert_eq!(m[(0, 0)].re, 1.0);
        assert_eq!(m[(1, 1)].re, 1.0);
        assert_eq!(m[(2, 2)].re, -1.0);
        assert_eq!(m[(3, 3)].re, -1.0);
    }

    #[test]
    fn commutation_criterion_matches_matrices() {
        let cases = [
            ("XX", "ZZ", true),
            ("XI", "ZI", false),
            ("XY", "YX", true),
            ("XI", "IZ", true),
            ("ZZ", "ZI", true),
        ];
        for (a, b, expect) in cases {
            let pa = PauliString::parse(a).unwrap();
            let pb = PauliString::parse(b).unwrap();
            assert_eq!(pa.commutes_with(&pb), expect, "{a} vs {b}");
            let (ma, mb) = (pa.matrix(), pb.matrix());
            let comm = &ma * &mb - &mb * &ma;
            let is_zero = max_norm_diff(&comm, &CMatrix::zeros(4, 4)) < 1e-14;
            assert_eq!(is_zero, expect, "matrix check {a} vs {b}");
        }
    }
}
