//! Observable measurement models for sampled circuits.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::ObservableSpec;
use crate::linalg::{expectation, CMatrix, CVector, StateVector};

/// How a circuit's observable value is extracted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measurement {
    /// The exact quantum expectation of the evolved state.
    ExactExpectation,
    /// Empirical average of `k` sampled observable eigenvalues, drawn in
    /// the observable's eigenbasis.
    Shots(usize),
}

/// Measures a fixed observable on evolved states; the eigensystem needed
/// for shot sampling is computed once on first use.
pub struct ObservableMeasurer {
    observable: ObservableSpec,
    eigen: std::sync::OnceLock<(Vec<f64>, CMatrix)>,
}

impl ObservableMeasurer {
    pub fn new(observable: &ObservableSpec) -> Self {
        Self {
            observable: observable.clone(),
            eigen: std::sync::OnceLock::new(),
        }
    }

    pub fn measure<R: Rng>(
        &self,
        state: &CVector,
        measurement: Measurement,
        rng: &mut R,
    ) -> Result<f64> {
        match measurement {
            Measurement::ExactExpectation => {
                let evolved = StateVector::new(state.clone())?;
                expectation(self.observable.operator(), &evolved)
            }
            Measurement::Shots(k) => {
                if k == 0 {
                    return Err(Error::TooFewSamples(0));
                }
                let (vals, vecs) = self
                    .eigen
                    .get_or_init(|| self.observable.operator().eigen());
                let amplitudes: CVector = vecs.adjoint() * state;
                let probs: Vec<f64> = amplitudes.iter().map(|a| a.norm_sqr()).collect();
                let dist = WeightedIndex::new(&probs)
                    .map_err(|e| Error::InvalidParams(format!("shot weights invalid: {e}")))?;
                let mean = (0..k).map(|_| vals[dist.sample(rng)]).sum::<f64>() / k as f64;
                Ok(mean)
            }
        }
    }
}
