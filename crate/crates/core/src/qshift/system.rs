//! Per-round linear-system assembly and solve.
//!
//! For each candidate length-r draw s⃗, the full slot list is the ordered
//! history with s⃗ appended on the outer end. Row w (a word of length
//! 0..=r) matches the circuit-side coefficient against the target
//! conjugation at the round's cumulative fraction; the empty-word row
//! encodes Σp = 1. The equations are derived from first principles by
//! word-coefficient matching, and the over-determined but consistent
//! system is solved by rank-revealing (SVD) least squares with a hard
//! residual gate: a residual above tolerance aborts the run with
//! diagnostics rather than degrading silently.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::policy::policy;
use crate::words::{all_words, conjugation_coefficients, target_coefficients, IndexWord};

use super::{ProtocolParams, QuasiDistribution, RoundContext};

/// Cap on the number of candidate words (L^r) per round.
pub const TRACTABILITY_GUARD: usize = 100_000;

/// Assembled round system: rows are words of length 0..=r, columns are
/// candidate length-r draws.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    round: usize,
    history: IndexWord,
    rows: Vec<IndexWord>,
    candidates: Vec<IndexWord>,
    a: DMatrix<f64>,
    b: DVector<f64>,
}

impl LinearSystem {
    pub fn rows(&self) -> &[IndexWord] {
        &self.rows
    }

    pub fn candidates(&self) -> &[IndexWord] {
        &self.candidates
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn history(&self) -> &IndexWord {
        &self.history
    }
}

/// Build the round system for the given adaptive context.
pub fn assemble_round_system(
    h: &Hamiltonian,
    params: &ProtocolParams,
    ctx: &RoundContext,
) -> Result<LinearSystem> {
    let l = h.n_terms();
    ctx.validate_for(params, l)?;
    let r = params.draws_in_round(ctx.round())?;

    let n_candidates = l.checked_pow(r as u32).unwrap_or(usize::MAX);
    if n_candidates > TRACTABILITY_GUARD {
        return Err(Error::TractabilityGuard {
            count: n_candidates,
            guard: TRACTABILITY_GUARD,
        });
    }

    let candidates = all_words(l, r);
    let rows: Vec<IndexWord> = (0..=r).flat_map(|len| all_words(l, len)).collect();

    let angle_scale = h.lambda() / params.n() as f64;
    let tau = params.cumulative_fraction(ctx.round())?;
    let target = target_coefficients(h, tau, r)?;

    let mut a = DMatrix::zeros(rows.len(), candidates.len());
    for (col, cand) in candidates.iter().enumerate() {
        let slots: Vec<usize> = ctx
            .history()
            .letters()
            .iter()
            .chain(cand.letters().iter())
            .copied()
            .collect();
        let series = conjugation_coefficients(&slots, angle_scale, r)?;
        for (row, word) in rows.iter().enumerate() {
            a[(row, col)] = series.coeff(word);
        }
    }
    let b = DVector::from_iterator(rows.len(), rows.iter().map(|w| target.coeff(w)));

    Ok(LinearSystem {
        round: ctx.round(),
        history: ctx.history().clone(),
        rows,
        candidates,
        a,
        b,
    })
}

/// Solve with the default residual tolerance from the numeric policy.
pub fn solve_round(system: &LinearSystem) -> Result<QuasiDistribution> {
    solve_round_with(system, policy().compositional_tol)
}

/// Rank-revealing least-squares solve. Fails if ‖Ap - b‖ exceeds `tol`;
/// rank deficiency below the candidate count is reported through the
/// distribution's `rank()` and resolved by the minimum-norm solution.
pub fn solve_round_with(system: &LinearSystem, tol: f64) -> Result<QuasiDistribution> {
    let svd = system.a.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let eps = if sigma_max > 0.0 {
        sigma_max * 1e-13 * system.a.nrows().max(system.a.ncols()) as f64
    } else {
        f64::EPSILON
    };
    let rank = svd.rank(eps);
    let p = svd
        .solve(&system.b, eps)
        .map_err(|msg| Error::InvalidParams(format!("svd solve failed: {msg}")))?;
    let residual = (&system.a * &p - &system.b).norm();
    if residual > tol {
        return Err(Error::SolverResidual {
            round: system.round,
            history: system.history.to_string(),
            residual,
            tol,
        });
    }
    let prune = policy().prune_tol;
    let coeffs: Vec<f64> = p
        .iter()
        .map(|&c| if c.abs() < prune { 0.0 } else { c })
        .collect();
    Ok(QuasiDistribution::from_parts(
        system.candidates.clone(),
        coeffs,
        residual,
        rank,
    ))
}

/// How the memo cache keys a round's history.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum HistoryKey {
    Ordered,
    /// Letter-count signature only; valid solely after an equality audit
    /// for the given Hamiltonian and parameters.
    Counts,
}

/// Memoized round distributions keyed by (round, history). Safe for
/// concurrent readers with exclusive insertion.
pub struct RoundCache {
    map: RwLock<HashMap<(usize, IndexWord), Arc<QuasiDistribution>>>,
    key: HistoryKey,
}

impl RoundCache {
    pub fn new() -> Self {
        Self {
            map: RwLock::new(HashMap::new()),
            key: HistoryKey::Ordered,
        }
    }

    /// Switch to count-signature keys after `audit_count_signature` has
    /// confirmed permutation invariance for this (H, params).
    pub fn with_count_keys_audited(
        h: &Hamiltonian,
        params: &ProtocolParams,
    ) -> Result<Self> {
        if !audit_count_signature(h, params)? {
            return Err(Error::InvalidParams(
                "count-signature keying rejected: permuted histories yield different distributions"
                    .into(),
            ));
        }
        Ok(Self {
            map: RwLock::new(HashMap::new()),
            key: HistoryKey::Counts,
        })
    }

    fn cache_key(&self, ctx: &RoundContext) -> (usize, IndexWord) {
        let word = match self.key {
            HistoryKey::Ordered => ctx.history().clone(),
            HistoryKey::Counts => {
                let mut letters = ctx.history().letters().to_vec();
                letters.sort_unstable();
                IndexWord::new(letters)
            }
        };
        (ctx.round(), word)
    }

    /// Fetch or assemble-and-solve the distribution for a context.
    pub fn distribution(
        &self,
        h: &Hamiltonian,
        params: &ProtocolParams,
        ctx: &RoundContext,
    ) -> Result<Arc<QuasiDistribution>> {
        let key = self.cache_key(ctx);
        if let Some(found) = self.map.read().expect("cache lock").get(&key) {
            return Ok(Arc::clone(found));
        }
        let system = assemble_round_system(h, params, ctx)?;
        let dist = Arc::new(solve_round(&system)?);
        let mut guard = self.map.write().expect("cache lock");
        let entry = guard.entry(key).or_insert_with(|| Arc::clone(&dist));
        Ok(Arc::clone(entry))
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Default for RoundCache {
    fn default() -> Self {
        Self::new()
    }
}

/// Solve every branch of every round: all histories of the prefix length
/// ahead of each round boundary, paired with their solved distributions.
pub fn enumerate_round_distributions(
    h: &Hamiltonian,
    params: &ProtocolParams,
) -> Result<Vec<(RoundContext, QuasiDistribution)>> {
    let l = h.n_terms();
    let mut out = Vec::new();
    for round in 1..=params.n_rounds() {
        let prefix_len = params.drawn_before_round(round)?;
        let path_count = l.checked_pow(prefix_len as u32).unwrap_or(usize::MAX);
        if path_count > 1_000_000 {
            return Err(Error::EnumerationGuard {
                count: path_count,
                guard: 1_000_000,
            });
        }
        for history in all_words(l, prefix_len) {
            let ctx = RoundContext::for_history(params, history, l)?;
            let system = assemble_round_system(h, params, &ctx)?;
            let dist = solve_round(&system)?;
            out.push((ctx, dist));
        }
    }
    Ok(out)
}

/// Check whether round distributions depend only on the history's letter
/// counts: solve every branch and compare distributions within groups of
/// equal count signature. Returns false on the first mismatch.
pub fn audit_count_signature(h: &Hamiltonian, params: &ProtocolParams) -> Result<bool> {
    let branches = enumerate_round_distributions(h, params)?;
    let mut by_signature: HashMap<(usize, Vec<usize>), &QuasiDistribution> = HashMap::new();
    let tol = policy().compositional_tol;
    for (ctx, dist) in &branches {
        let sig = (ctx.round(), ctx.counts().to_vec());
        match by_signature.get(&sig) {
            None => {
                by_signature.insert(sig, dist);
            }
            Some(seen) => {
                let agree = seen
                    .coeffs()
                    .iter()
                    .zip(dist.coeffs().iter())
                    .all(|(a, b)| (a - b).abs() <= tol);
                if !agree {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_tfim, Hamiltonian, HermitianTerm};
    use crate::pauli::PauliString;

    fn weighted_tfim(h1: f64, h2: f64) -> Hamiltonian {
        build_tfim(2, h1, h2).unwrap()
    }

    fn single_term() -> Hamiltonian {
        let t = HermitianTerm::from_pauli_summands(
            "ZZ",
            0.9,
            2,
            vec![PauliString::parse("ZZ").unwrap()],
        )
        .unwrap();
        Hamiltonian::new(vec![t]).unwrap()
    }

    #[test]
    fn first_round_single_draw_recovers_weight_fractions() {
        // (N=2, r=1), round 1: p_i = h_i / λ
        let h = weighted_tfim(0.8, 0.5);
        let params = ProtocolParams::uniform(2, 1).unwrap();
        let ctx = RoundContext::initial(2);
        let system = assemble_round_system(&h, &params, &ctx).unwrap();
        let dist = solve_round(&system).unwrap();
        let lambda = 1.3;
        assert!((dist.coeff(&IndexWord::new(vec![0])) - 0.8 / lambda).abs() <= 1e-12);
        assert!((dist.coeff(&IndexWord::new(vec![1])) - 0.5 / lambda).abs() <= 1e-12);
        assert!((dist.sum() - 1.0).abs() <= 1e-12);
        assert!(dist.residual() <= 1e-12);
    }

    #[test]
    fn two_draw_round_solves_known_closed_form() {
        // (N=2, r=2), round 1: p_ii = h_i(h_i-h_j)/λ², p_ij = p_ji = 2h_i h_j/λ²
        let (h1, h2) = (1.0, 0.1);
        let h = weighted_tfim(h1, h2);
        let params = ProtocolParams::uniform(2, 2).unwrap();
        let system = assemble_round_system(&h, &params, &RoundContext::initial(2)).unwrap();
        let dist = solve_round(&system).unwrap();
        let l2 = (h1 + h2) * (h1 + h2);
        assert!((dist.coeff(&IndexWord::new(vec![0, 0])) - h1 * (h1 - h2) / l2).abs() <= 1e-12);
        assert!((dist.coeff(&IndexWord::new(vec![0, 1])) - 2.0 * h1 * h2 / l2).abs() <= 1e-12);
        assert!((dist.coeff(&IndexWord::new(vec![1, 0])) - 2.0 * h1 * h2 / l2).abs() <= 1e-12);
        assert!((dist.coeff(&IndexWord::new(vec![1, 1])) - h2 * (h2 - h1) / l2).abs() <= 1e-12);
        assert!(dist.coeff(&IndexWord::new(vec![1, 1])) < 0.0);
        assert!(dist.z() > 1.0);
    }

    #[test]
    fn single_term_hamiltonian_is_deterministic() {
        let h = single_term();
        for (n, r) in [(2usize, 1usize), (3, 3), (4, 2)] {
            let params = ProtocolParams::uniform(n, r).unwrap();
            let system =
                assemble_round_system(&h, &params, &RoundContext::initial(1)).unwrap();
            let dist = solve_round(&system).unwrap();
            assert_eq!(dist.len(), 1);
            assert!((dist.coeffs()[0] - 1.0).abs() <= 1e-12);
            assert!((dist.z() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn random_three_term_round_is_consistent() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        // three commuting-free random Hermitian terms on 2 qubits
        let mut terms = Vec::new();
        for label in ["a", "b", "c"] {
            let raw = crate::linalg::CMatrix::from_fn(4, 4, |_, _| {
                num_complex::Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let herm = (&raw + raw.adjoint()) * num_complex::Complex64::new(0.5, 0.0);
            terms.push(
                HermitianTerm::new(
                    label,
                    0.2 + rng.gen::<f64>(),
                    crate::linalg::HermitianMatrix::new(herm).unwrap(),
                )
                .unwrap(),
            );
        }
        let h = Hamiltonian::new(terms).unwrap();
        let params = ProtocolParams::uniform(4, 2).unwrap();
        let system = assemble_round_system(&h, &params, &RoundContext::initial(3)).unwrap();
        let dist = solve_round(&system).unwrap();
        assert!(dist.residual() <= 1e-10, "residual {}", dist.residual());
        assert!((dist.sum() - 1.0).abs() <= 1e-10);
        assert_eq!(dist.len(), 9);
    }

    #[test]
    fn later_rounds_depend_on_history_order() {
        // ordered histories [1,2] and [2,1] give different round-2 systems
        let h = weighted_tfim(0.7, 0.3);
        let params = ProtocolParams::uniform(4, 2).unwrap();
        let d12 = solve_round(
            &assemble_round_system(
                &h,
                &params,
                &RoundContext::for_history(&params, IndexWord::new(vec![0, 1]), 2).unwrap(),
            )
            .unwrap(),
        )
        .unwrap();
        let d21 = solve_round(
            &assemble_round_system(
                &h,
                &params,
                &RoundContext::for_history(&params, IndexWord::new(vec![1, 0]), 2).unwrap(),
            )
            .unwrap(),
        )
        .unwrap();
        // frozen from the hand-solved 4-unknown system at (0.7, 0.3)
        assert!((d12.coeff(&IndexWord::new(vec![0, 0])) - 0.72).abs() <= 1e-10);
        assert!((d12.coeff(&IndexWord::new(vec![0, 1])) - 0.48).abs() <= 1e-10);
        assert!((d12.coeff(&IndexWord::new(vec![1, 0])) + 0.12).abs() <= 1e-10);
        assert!((d12.coeff(&IndexWord::new(vec![1, 1])) + 0.08).abs() <= 1e-10);
        assert!((d21.coeff(&IndexWord::new(vec![0, 1])) - 1.48).abs() <= 1e-10);
        assert!((d21.coeff(&IndexWord::new(vec![1, 0])) + 1.12).abs() <= 1e-10);
        assert!(!audit_count_signature(&h, &params).unwrap());
        assert!(RoundCache::with_count_keys_audited(&h, &params).is_err());
    }

    #[test]
    fn cache_returns_shared_solutions() {
        let h = weighted_tfim(1.0, 0.1);
        let params = ProtocolParams::uniform(2, 2).unwrap();
        let cache = RoundCache::new();
        let ctx = RoundContext::initial(2);
        let a = cache.distribution(&h, &params, &ctx).unwrap();
        let b = cache.distribution(&h, &params, &ctx).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(cache.len(), 1);
    }

    #[test]
    fn branch_enumeration_covers_all_rounds() {
        let h = weighted_tfim(1.0, 0.1);
        let params = ProtocolParams::uniform(4, 2).unwrap();
        let branches = enumerate_round_distributions(&h, &params).unwrap();
        // round 1: one empty history; round 2: four length-2 histories
        assert_eq!(branches.len(), 5);
        for (_, dist) in &branches {
            assert!((dist.sum() - 1.0).abs() <= 1e-10);
            assert!(dist.z() >= 1.0 - 1e-10);
            assert!(dist.residual() <= 1e-10);
        }
    }

    #[test]
    fn tractability_guard_trips() {
        let h = weighted_tfim(1.0, 0.1);
        let params = ProtocolParams::uniform(18, 18).unwrap();
        let err = assemble_round_system(&h, &params, &RoundContext::initial(2));
        assert!(matches!(err, Err(Error::TractabilityGuard { .. })));
    }
}
