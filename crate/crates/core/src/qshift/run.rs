//! Protocol execution: adaptive sampling, exact ensemble evaluation, and
//! estimator-variance enumeration.
//!
//! A full circuit is the concatenation of the per-round draws, round 1
//! innermost; with slots (s_0, ..., s_{N-1}) the measured value is
//! <psi| V_{s_{N-1}}† ... V_{s_0}† Q V_{s_0} ... V_{s_{N-1}} |psi> with
//! V_i = e^{-i(tλ/N)H_i}. Sampling draws each round's word from
//! q = |p|/Z and multiplies the outcome weight by Z·sign(p), which keeps
//! the estimator unbiased for the signed ensemble.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{exact_expectation, ObservableSpec};
use crate::hamiltonian::Hamiltonian;
use crate::linalg::{expectation, CMatrix, HermitianMatrix, StateVector, UnitaryMatrix};
use crate::measure::{Measurement, ObservableMeasurer};
use crate::stats::EstimateSummary;
use crate::words::IndexWord;

use super::{ProtocolParams, RoundCache, RoundContext, SampledPath};

/// One sampled trajectory and its signed estimator value
/// weight × measurement.
#[derive(Debug, Clone)]
pub struct Sample {
    pub path: SampledPath,
    pub value: f64,
}

/// Monte-Carlo output: the estimate plus the average sampling overhead
/// E[|Π Z·sign|] actually realized.
#[derive(Debug, Clone)]
pub struct MonteCarloRun {
    pub summary: EstimateSummary,
    pub mean_abs_weight: f64,
}

/// Reusable state for running one (H, Q, psi, t, params) configuration:
/// pool unitaries, the memoized round distributions, and the observable
/// eigensystem for shot sampling.
pub struct ProtocolRun<'a> {
    h: &'a Hamiltonian,
    psi: &'a StateVector,
    t: f64,
    params: ProtocolParams,
    cache: RoundCache,
    pool: Vec<UnitaryMatrix>,
    measurer: ObservableMeasurer,
}

impl<'a> ProtocolRun<'a> {
    pub fn new(
        h: &'a Hamiltonian,
        q: &'a ObservableSpec,
        psi: &'a StateVector,
        t: f64,
        params: ProtocolParams,
    ) -> Result<Self> {
        if h.dim() != q.dim() || h.dim() != psi.dim() {
            return Err(Error::DimensionMismatch {
                left: h.dim(),
                right: q.dim().min(psi.dim()),
            });
        }
        if t < 0.0 {
            return Err(Error::InvalidParams(format!(
                "evolution time must be nonnegative, got {t}"
            )));
        }
        let angle = t * h.lambda() / params.n() as f64;
        let pool = (0..h.n_terms())
            .map(|i| h.term_unitary(i, angle))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            h,
            psi,
            t,
            params,
            cache: RoundCache::new(),
            pool,
            measurer: ObservableMeasurer::new(q),
        })
    }

    pub fn params(&self) -> &ProtocolParams {
        &self.params
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Draw one complete path and evaluate it.
    pub fn sample<R: Rng>(&self, rng: &mut R, measurement: Measurement) -> Result<Sample> {
        let mut ctx = RoundContext::initial(self.h.n_terms());
        let mut words = Vec::with_capacity(self.params.n_rounds());
        let mut weight = 1.0;
        for _ in 0..self.params.n_rounds() {
            let dist = self.cache.distribution(self.h, &self.params, &ctx)?;
            let view = dist.sampling_view();
            let idx = if view.q.iter().all(|&q| q == 0.0) {
                return Err(Error::InconsistentContext(
                    "round distribution has no sampleable weight".into(),
                ));
            } else {
                WeightedIndex::new(&view.q)
                    .map_err(|e| Error::InvalidParams(format!("sampling weights invalid: {e}")))?
                    .sample(rng)
            };
            weight *= view.z * view.signs[idx];
            let draw = dist.candidates()[idx].clone();
            ctx = ctx.advanced(&draw);
            words.push(draw);
        }
        let circuit = ctx.history().clone();
        let value = weight * self.measure_circuit(&circuit, measurement, rng)?;
        Ok(Sample {
            path: SampledPath {
                words,
                weight,
                circuit,
            },
            value,
        })
    }

    /// Monte-Carlo estimate over `n_samples` paths. Samples are generated
    /// on independent per-index RNG streams derived from `seed`, so the
    /// result is deterministic regardless of thread scheduling.
    pub fn monte_carlo(
        &self,
        seed: u64,
        n_samples: usize,
        measurement: Measurement,
    ) -> Result<MonteCarloRun> {
        if n_samples < 1 {
            return Err(Error::TooFewSamples(n_samples));
        }
        // warm the distribution cache on one thread first
        {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            self.sample(&mut rng, measurement)?;
        }
        let results: Vec<(f64, f64)> = (0..n_samples as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i);
                self.sample(&mut rng, measurement)
                    .map(|s| (s.value, s.path.weight))
            })
            .collect::<Result<_>>()?;
        let values: Vec<f64> = results.iter().map(|(v, _)| *v).collect();
        let weight_sq =
            results.iter().map(|(_, w)| w * w).sum::<f64>() / n_samples as f64;
        let mean_abs_weight =
            results.iter().map(|(_, w)| w.abs()).sum::<f64>() / n_samples as f64;
        let mut summary = EstimateSummary::from_samples(&values)?;
        summary.z_product_mean_square = Some(weight_sq);
        Ok(MonteCarloRun {
            summary,
            mean_abs_weight,
        })
    }

    /// <psi|U†QU|psi> for a slot word, or the shot-averaged version.
    fn measure_circuit<R: Rng>(
        &self,
        circuit: &IndexWord,
        measurement: Measurement,
        rng: &mut R,
    ) -> Result<f64> {
        // slots apply to the state outermost-first
        let mut state = self.psi.vector().clone();
        for &slot in circuit.letters().iter().rev() {
            state = self.pool[slot].matrix() * state;
        }
        self.measurer.measure(&state, measurement, rng)
    }
}

/// Exact signed-ensemble value plus path-weight statistics.
#[derive(Debug, Clone, Copy)]
pub struct EnsembleResult {
    /// Σ over complete paths of (Π p_round)·<psi|U†QU|psi>.
    pub value: f64,
    /// Σ over complete paths of Π|p_round| (expected |sampling weight|).
    pub path_one_norm: f64,
    pub n_paths: usize,
}

/// Enumerate the full adaptive tree, weighting each complete path by the
/// product of signed round coefficients (no Z, no sampling). This is the
/// noiseless algorithmic value used for error-scaling sweeps.
pub fn exact_ensemble(
    h: &Hamiltonian,
    q: &ObservableSpec,
    psi: &StateVector,
    t: f64,
    params: &ProtocolParams,
) -> Result<EnsembleResult> {
    let l = h.n_terms();
    let paths = l.checked_pow(params.n() as u32).unwrap_or(usize::MAX);
    if paths > 1_000_000 {
        return Err(Error::EnumerationGuard {
            count: paths,
            guard: 1_000_000,
        });
    }
    let angle = t * h.lambda() / params.n() as f64;
    let pool: Vec<UnitaryMatrix> = (0..l)
        .map(|i| h.term_unitary(i, angle))
        .collect::<Result<_>>()?;
    let cache = RoundCache::new();

    struct Walker<'w> {
        h: &'w Hamiltonian,
        psi: &'w StateVector,
        params: &'w ProtocolParams,
        pool: &'w [UnitaryMatrix],
        cache: &'w RoundCache,
        value: f64,
        one_norm: f64,
        n_paths: usize,
    }

    impl Walker<'_> {
        /// `conjugated` is V_hist† Q V_hist for the context's history.
        fn walk(
            &mut self,
            ctx: &RoundContext,
            conjugated: &CMatrix,
            weight: f64,
            abs_weight: f64,
        ) -> Result<()> {
            if ctx.round() > self.params.n_rounds() {
                let m = HermitianMatrix::new(conjugated.clone())?;
                let val = expectation(&m, self.psi)?;
                self.value += weight * val;
                self.one_norm += abs_weight;
                self.n_paths += 1;
                return Ok(());
            }
            let dist = self.cache.distribution(self.h, self.params, ctx)?;
            for (word, p) in dist.iter() {
                let mut grown = conjugated.clone();
                for &slot in word.letters() {
                    let u = self.pool[slot].matrix();
                    grown = u.adjoint() * grown * u;
                }
                self.walk(&ctx.advanced(word), &grown, weight * p, abs_weight * p.abs())?;
            }
            Ok(())
        }
    }

    let mut walker = Walker {
        h,
        psi,
        params,
        pool: &pool,
        cache: &cache,
        value: 0.0,
        one_norm: 0.0,
        n_paths: 0,
    };
    let ctx = RoundContext::initial(l);
    walker.walk(&ctx, q.operator().matrix(), 1.0, 1.0)?;
    Ok(EnsembleResult {
        value: walker.value,
        path_one_norm: walker.one_norm,
        n_paths: walker.n_paths,
    })
}

/// Σ p_path <psi|U†QU|psi> over the whole adaptive tree.
pub fn exact_ensemble_expectation(
    h: &Hamiltonian,
    q: &ObservableSpec,
    psi: &StateVector,
    t: f64,
    params: &ProtocolParams,
) -> Result<f64> {
    Ok(exact_ensemble(h, q, psi, t, params)?.value)
}

/// |exact <Q(t)> - ensemble <Q(t)>|, the protocol's algorithmic error.
pub fn algorithmic_error(
    h: &Hamiltonian,
    q: &ObservableSpec,
    psi: &StateVector,
    t: f64,
    params: &ProtocolParams,
) -> Result<f64> {
    let ensemble = exact_ensemble_expectation(h, q, psi, t, params)?;
    let exact = exact_expectation(h, q, psi, t)?;
    Ok((exact - ensemble).abs())
}

/// Exact variance of the single-sample estimator X = (Π Z·sign)·measurement
/// under the q-sampling distribution, by full tree enumeration.
pub fn enumerated_variance(
    h: &Hamiltonian,
    q: &ObservableSpec,
    psi: &StateVector,
    t: f64,
    params: &ProtocolParams,
) -> Result<f64> {
    let l = h.n_terms();
    let paths = l.checked_pow(params.n() as u32).unwrap_or(usize::MAX);
    if paths > 1_000_000 {
        return Err(Error::EnumerationGuard {
            count: paths,
            guard: 1_000_000,
        });
    }
    let angle = t * h.lambda() / params.n() as f64;
    let pool: Vec<UnitaryMatrix> = (0..l)
        .map(|i| h.term_unitary(i, angle))
        .collect::<Result<_>>()?;
    let cache = RoundCache::new();

    // accumulate E_q[X] and E_q[X²] over complete paths
    #[allow(clippy::too_many_arguments)]
    fn walk(
        h: &Hamiltonian,
        psi: &StateVector,
        params: &ProtocolParams,
        pool: &[UnitaryMatrix],
        cache: &RoundCache,
        ctx: &RoundContext,
        conjugated: &CMatrix,
        q_prob: f64,
        zsign: f64,
        moments: &mut (f64, f64),
    ) -> Result<()> {
        if ctx.round() > params.n_rounds() {
            let m = HermitianMatrix::new(conjugated.clone())?;
            let x = zsign * expectation(&m, psi)?;
            moments.0 += q_prob * x;
            moments.1 += q_prob * x * x;
            return Ok(());
        }
        let dist = cache.distribution(h, params, ctx)?;
        let view = dist.sampling_view();
        for (idx, (word, _)) in dist.iter().enumerate() {
            if view.q[idx] == 0.0 {
                continue;
            }
            let mut grown = conjugated.clone();
            for &slot in word.letters() {
                let u = pool[slot].matrix();
                grown = u.adjoint() * grown * u;
            }
            walk(
                h,
                psi,
                params,
                pool,
                cache,
                &ctx.advanced(word),
                &grown,
                q_prob * view.q[idx],
                zsign * view.z * view.signs[idx],
                moments,
            )?;
        }
        Ok(())
    }

    let mut moments = (0.0, 0.0);
    walk(
        h,
        psi,
        params,
        &pool,
        &cache,
        &RoundContext::initial(l),
        q.operator().matrix(),
        1.0,
        1.0,
        &mut moments,
    )?;
    Ok(moments.1 - moments.0 * moments.0)
}
