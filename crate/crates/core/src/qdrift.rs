//! Baseline randomized-compiling protocol with a fixed distribution.
//!
//! N operators are drawn i.i.d. from the pool {V_i = e^{-i(tλ/N)H_i}}
//! with p_i = h_i/λ. The exact ensemble average is evaluated by Heisenberg
//! channel iteration, Q ← Σ_i p_i V_i†QV_i repeated N times, which is
//! exact because the rounds are independent and identically distributed;
//! a brute-force sequence enumeration is kept for cross-checks at tiny
//! sizes.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::ObservableSpec;
use crate::hamiltonian::Hamiltonian;
use crate::linalg::{expectation, HermitianMatrix, StateVector, UnitaryMatrix};
use crate::measure::{Measurement, ObservableMeasurer};
use crate::stats::EstimateSummary;
use crate::words::all_words;

/// Total number of sampled operators; N > L is not enforced because the
/// benchmark regime itself uses N = L.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QdriftParams {
    n: usize,
}

impl QdriftParams {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("N must be at least 1".into()));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Fixed sampling distribution p_i = h_i/λ.
pub fn qdrift_distribution(h: &Hamiltonian) -> Vec<f64> {
    let lambda = h.lambda();
    h.weights().iter().map(|w| w / lambda).collect()
}

/// Exact ensemble value by channel iteration: Q_N after N applications of
/// Q ← Σ_i p_i V_i†QV_i.
pub fn qdrift_ensemble_expectation(
    h: &Hamiltonian,
    q: &ObservableSpec,
    psi: &StateVector,
    t: f64,
    params: QdriftParams,
) -> Result<f64> {
    let probs = qdrift_distribution(h);
    let angle = t * h.lambda() / params.n() as f64;
    let pool: Vec<UnitaryMatrix> = (0..h.n_terms())
        .map(|i| h.term_unitary(i, angle))
        .collect::<Result<_>>()?;
    let mut current = q.operator().matrix().clone();
    for _ in 0..params.n() {
        let mut next = &current * num_complex::Complex64::new(0.0, 0.0);
        for (p, v) in probs.iter().zip(pool.iter()) {
            next += (v.matrix().adjoint() * &current * v.matrix())
                * num_complex::Complex64::new(*p, 0.0);
        }
        current = next;
    }
    expectation(&HermitianMatrix::new(current)?, psi)
}

/// Brute-force L^N sequence enumeration of the ensemble; cross-check for
/// the channel iteration at tiny sizes.
pub fn qdrift_enumerated_expectation(
    h: &Hamiltonian,
    q: &ObservableSpec,
    psi: &StateVector,
    t: f64,
    params: QdriftParams,
) -> Result<f64> {
    enumerate_moments(h, q, psi, t, params).map(|(mean, _)| mean)
}

/// Exact single-sample variance over all L^N sequences.
pub fn qdrift_enumerated_variance(
    h: &Hamiltonian,
    q: &ObservableSpec,
    psi: &StateVector,
    t: f64,
    params: QdriftParams,
) -> Result<f64> {
    enumerate_moments(h, q, psi, t, params).map(|(mean, second)| second - mean * mean)
}

fn enumerate_moments(
    h: &Hamiltonian,
    q: &ObservableSpec,
    psi: &StateVector,
    t: f64,
    params: QdriftParams,
) -> Result<(f64, f64)> {
    let l = h.n_terms();
    let count = l.checked_pow(params.n() as u32).unwrap_or(usize::MAX);
    if count > 1_000_000 {
        return Err(Error::EnumerationGuard {
            count,
            guard: 1_000_000,
        });
    }
    let probs = qdrift_distribution(h);
    let angle = t * h.lambda() / params.n() as f64;
    let pool: Vec<UnitaryMatrix> = (0..l)
        .map(|i| h.term_unitary(i, angle))
        .collect::<Result<_>>()?;
    let mut mean = 0.0;
    let mut second = 0.0;
    for word in all_words(l, params.n()) {
        let mut weight = 1.0;
        let mut state = psi.vector().clone();
        for &slot in word.letters().iter().rev() {
            weight *= probs[slot];
            state = pool[slot].matrix() * state;
        }
        let evolved = StateVector::new(state)?;
        let value = expectation(q.operator(), &evolved)?;
        mean += weight * value;
        second += weight * value * value;
    }
    Ok((mean, second))
}

/// Reusable sampling state for one (H, Q, psi, t, N) configuration.
pub struct QdriftRun<'a> {
    psi: &'a StateVector,
    n: usize,
    pool: Vec<UnitaryMatrix>,
    index_dist: WeightedIndex<f64>,
    measurer: ObservableMeasurer,
}

impl<'a> QdriftRun<'a> {
    pub fn new(
        h: &'a Hamiltonian,
        q: &'a ObservableSpec,
        psi: &'a StateVector,
        t: f64,
        params: QdriftParams,
    ) -> Result<Self> {
        if h.dim() != q.dim() || h.dim() != psi.dim() {
            return Err(Error::DimensionMismatch {
                left: h.dim(),
                right: q.dim().min(psi.dim()),
            });
        }
        let angle = t * h.lambda() / params.n() as f64;
        let pool = (0..h.n_terms())
            .map(|i| h.term_unitary(i, angle))
            .collect::<Result<Vec<_>>>()?;
        let index_dist = WeightedIndex::new(qdrift_distribution(h))
            .map_err(|e| Error::InvalidParams(format!("weights invalid: {e}")))?;
        Ok(Self {
            psi,
            n: params.n(),
            pool,
            index_dist,
            measurer: ObservableMeasurer::new(q),
        })
    }

    /// One sampled circuit value.
    pub fn sample<R: Rng>(&self, rng: &mut R, measurement: Measurement) -> Result<f64> {
        let mut state = self.psi.vector().clone();
        for _ in 0..self.n {
            state = self.pool[self.index_dist.sample(rng)].matrix() * state;
        }
        self.measurer.measure(&state, measurement, rng)
    }

    /// Monte-Carlo estimate with per-sample derived RNG streams.
    pub fn monte_carlo(
        &self,
        seed: u64,
        n_samples: usize,
        measurement: Measurement,
    ) -> Result<EstimateSummary> {
        if n_samples < 1 {
            return Err(Error::TooFewSamples(n_samples));
        }
        let values: Vec<f64> = (0..n_samples as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i);
                self.sample(&mut rng, measurement)
            })
            .collect::<Result<_>>()?;
        let mut summary = EstimateSummary::from_samples(&values)?;
        summary.z_product_mean_square = Some(1.0);
        Ok(summary)
    }
}

/// Convenience one-shot sample; builds the pool on each call.
pub fn qdrift_sample<R: Rng>(
    h: &Hamiltonian,
    q: &ObservableSpec,
    psi: &StateVector,
    t: f64,
    params: QdriftParams,
    rng: &mut R,
    measurement: Measurement,
) -> Result<f64> {
    QdriftRun::new(h, q, psi, t, params)?.sample(rng, measurement)
}
