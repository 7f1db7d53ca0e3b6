//! Numeric tolerance policy.
//!
//! All tolerances used by the library are fixed constants collected here,
//! overridable only through the single global policy record so that test
//! runs are reproducible.

use std::sync::RwLock;

/// Tolerance bundle shared by every module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericPolicy {
    /// Structural checks: Hermiticity, unitarity, state normalization.
    pub structural_tol: f64,
    /// Compositional checks: group properties, round normalization,
    /// solver residual gates.
    pub compositional_tol: f64,
    /// Coefficients with magnitude below this are pruned to exactly zero.
    pub prune_tol: f64,
    /// Imaginary residue allowed when an expectation value is taken real.
    pub imag_tol: f64,
    /// Errors below this are treated as round-off noise and excluded
    /// from log-log fits.
    pub noise_floor: f64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self {
            structural_tol: 1e-12,
            compositional_tol: 1e-10,
            prune_tol: 1e-14,
            imag_tol: 1e-10,
            noise_floor: 1e-12,
        }
    }
}

static GLOBAL: RwLock<NumericPolicy> = RwLock::new(NumericPolicy {
    structural_tol: 1e-12,
    compositional_tol: 1e-10,
    prune_tol: 1e-14,
    imag_tol: 1e-10,
    noise_floor: 1e-12,
});

/// Current global policy (copied; the record is tiny).
pub fn policy() -> NumericPolicy {
    *GLOBAL.read().expect("policy lock poisoned")
}

/// Replace the global policy. Intended for controlled experiments only;
/// the defaults are part of the library contract.
pub fn set_policy(p: NumericPolicy) {
    *GLOBAL.write().expect("policy lock poisoned") = p;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_contract() {
        let p = NumericPolicy::default();
        assert_eq!(p.structural_tol, 1e-12);
        assert_eq!(p.compositional_tol, 1e-10);
        assert_eq!(p.prune_tol, 1e-14);
        assert_eq!(policy(), p);
    }
}
