//! Adaptive quasi-probability sampling protocol (qSHIFT).
//!
//! Given parameters (N, r) with r dividing N — or an explicit draw
//! schedule {s_i} summing to N — the protocol draws r operators from the
//! pool {e^{-i(tλ/N)H_i}} in each of N/r rounds. Before each round it
//! solves a linear system over length-r index words so that the
//! quasi-probability-weighted ensemble, conditioned on the ordered draw
//! history, matches the target conjugation e^{iτtH} Q e^{-iτtH} order by
//! order through t^r, with τ the fraction of operators drawn through the
//! round. Solved coefficients may be negative; sampling then uses
//! q = |p|/Z with outcomes weighted by Z·sign(p).
//!
//! Within a full slot list, round-1 draws sit innermost (their conjugation
//! acts next to Q) and each later round's draws are appended outward.

mod closed_form;
mod run;
mod system;

pub use closed_form::{closed_form, ClosedFormVariant};
pub use crate::measure::Measurement;
pub use run::{
    algorithmic_error, enumerated_variance, exact_ensemble, exact_ensemble_expectation,
    EnsembleResult, MonteCarloRun, ProtocolRun, Sample,
};
pub use system::{
    assemble_round_system, audit_count_signature, enumerate_round_distributions,
    solve_round, solve_round_with, LinearSystem, RoundCache, TRACTABILITY_GUARD,
};

use crate::error::{Error, Result};
use crate::words::IndexWord;

/// Protocol parameters: total operator count N and the per-round draw
/// schedule (uniform r unless an explicit schedule is given).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolParams {
    n: usize,
    rounds: Vec<usize>,
    uniform_r: Option<usize>,
}

impl ProtocolParams {
    /// (N, r) with N a multiple of r.
    pub fn uniform(n: usize, r: usize) -> Result<Self> {
        if n == 0 || r == 0 {
            return Err(Error::InvalidParams(format!(
                "N and r must be positive, got N={n}, r={r}"
            )));
        }
        if n % r != 0 {
            return Err(Error::InvalidParams(format!(
                "N={n} must be a multiple of r={r} (or use an explicit schedule)"
            )));
        }
        Ok(Self {
            n,
            rounds: vec![r; n / r],
            uniform_r: Some(r),
        })
    }

    /// Arbitrary per-round draw counts {s_i}; N is their sum.
    pub fn scheduled(schedule: Vec<usize>) -> Result<Self> {
        if schedule.is_empty() || schedule.iter().any(|&s| s == 0) {
            return Err(Error::InvalidParams(
                "schedule entries must be positive and nonempty".into(),
            ));
        }
        let n = schedule.iter().sum();
        Ok(Self {
            n,
            rounds: schedule,
            uniform_r: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Per-round draw counts.
    pub fn rounds(&self) -> &[usize] {
        &self.rounds
    }

    pub fn n_rounds(&self) -> usize {
        self.rounds.len()
    }

    /// The uniform draw count, if the schedule was not explicit.
    pub fn uniform_r(&self) -> Option<usize> {
        self.uniform_r
    }

    /// Draw count of the given 1-based round.
    pub fn draws_in_round(&self, round: usize) -> Result<usize> {
        self.rounds
            .get(round - 1)
            .copied()
            .ok_or_else(|| Error::InvalidParams(format!("round {round} out of range")))
    }

    /// Operators drawn before the given 1-based round starts.
    pub fn drawn_before_round(&self, round: usize) -> Result<usize> {
        if round == 0 || round > self.rounds.len() {
            return Err(Error::InvalidParams(format!("round {round} out of range")));
        }
        Ok(self.rounds[..round - 1].iter().sum())
    }

    /// Cumulative evolved fraction after the given round completes:
    /// (operators drawn through the round) / N.
    pub fn cumulative_fraction(&self, round: usize) -> Result<f64> {
        let drawn = self.drawn_before_round(round)? + self.draws_in_round(round)?;
        Ok(drawn as f64 / self.n as f64)
    }
}

/// Adaptive state between rounds: the 1-based round index, the ordered
/// history of drawn term indices, and per-term counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundContext {
    round: usize,
    history: IndexWord,
    counts: Vec<usize>,
}

impl RoundContext {
    /// Round 1 with an empty history, over `l` terms.
    pub fn initial(l: usize) -> Self {
        Self {
            round: 1,
            history: IndexWord::empty(),
            counts: vec![0; l],
        }
    }

    /// Context for an explicit history; the round index must be consistent
    /// with the schedule prefix sums.
    pub fn for_history(params: &ProtocolParams, history: IndexWord, l: usize) -> Result<Self> {
        history.validate_letters(l)?;
        let mut drawn = 0usize;
        for (idx, &s) in params.rounds().iter().enumerate() {
            if drawn == history.len() {
                let counts = history.histogram(l);
                return Ok(Self {
                    round: idx + 1,
                    history,
                    counts,
                });
            }
            drawn += s;
        }
        Err(Error::InconsistentContext(format!(
            "history length {} does not align with any round boundary of schedule {:?}",
            history.len(),
            params.rounds()
        )))
    }

    /// Context after appending this round's draw.
    pub fn advanced(&self, draw: &IndexWord) -> Self {
        let history = self.history.concat(draw);
        let mut counts = self.counts.clone();
        for &letter in draw.letters() {
            counts[letter] += 1;
        }
        Self {
            round: self.round + 1,
            history,
            counts,
        }
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn history(&self) -> &IndexWord {
        &self.history
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn drawn_so_far(&self) -> usize {
        self.history.len()
    }

    /// Check the context against the schedule: history length must equal
    /// the operators drawn before this round, and counts must equal the
    /// history histogram.
    pub fn validate_for(&self, params: &ProtocolParams, l: usize) -> Result<()> {
        self.history.validate_letters(l)?;
        let expected = params.drawn_before_round(self.round)?;
        if self.history.len() != expected {
            return Err(Error::InconsistentContext(format!(
                "round {} expects {} drawn operators, history has {}",
                self.round,
                expected,
                self.history.len()
            )));
        }
        if self.counts != self.history.histogram(l) {
            return Err(Error::InconsistentContext(
                "counts do not match the history histogram".into(),
            ));
        }
        Ok(())
    }
}

/// Per-round signed coefficients p over length-r words, with the one-norm
/// Z = Σ|p| and the solver residual.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiDistribution {
    candidates: Vec<IndexWord>,
    coeffs: Vec<f64>,
    z: f64,
    residual: f64,
    rank: usize,
}

impl QuasiDistribution {
    pub(crate) fn from_parts(
        candidates: Vec<IndexWord>,
        coeffs: Vec<f64>,
        residual: f64,
        rank: usize,
    ) -> Self {
        let z = coeffs.iter().map(|c| c.abs()).sum();
        Self {
            candidates,
            coeffs,
            z,
            residual,
            rank,
        }
    }

    pub fn candidates(&self) -> &[IndexWord] {
        &self.candidates
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Signed coefficient of a candidate word (0 if absent).
    pub fn coeff(&self, word: &IndexWord) -> f64 {
        self.candidates
            .iter()
            .position(|w| w == word)
            .map(|i| self.coeffs[i])
            .unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    /// Z = Σ|p| ≥ 1 whenever Σp = 1.
    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_rank_deficient(&self) -> bool {
        self.rank < self.candidates.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&IndexWord, f64)> {
        self.candidates.iter().zip(self.coeffs.iter().copied())
    }

    /// Quasi-probability view: q = |p|/Z with the sign bookkeeping needed
    /// to keep the estimator unbiased. If all p ≥ 0 then Z = 1 and q = p.
    pub fn sampling_view(&self) -> SamplingView {
        let z = if self.z == 0.0 { 1.0 } else { self.z };
        let q = self.coeffs.iter().map(|c| c.abs() / z).collect();
        let signs = self
            .coeffs
            .iter()
            .map(|c| if *c < 0.0 { -1.0 } else { 1.0 })
            .collect();
        SamplingView {
            q,
            signs,
            z: self.z,
        }
    }
}

/// Normalized sampling weights q = |p|/Z, aligned with the distribution's
/// candidate order.
#[derive(Debug, Clone)]
pub struct SamplingView {
    pub q: Vec<f64>,
    pub signs: Vec<f64>,
    pub z: f64,
}

/// One complete sampled trajectory: per-round draws, the accumulated
/// weight Π(Z_round · sign), and the full N-operator slot list.
#[derive(Debug, Clone)]
pub struct SampledPath {
    pub words: Vec<IndexWord>,
    pub weight: f64,
    pub circuit: IndexWord,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_params_resolve_schedule() {
        let p = ProtocolParams::uniform(6, 2).unwrap();
        assert_eq!(p.rounds(), &[2, 2, 2]);
        assert_eq!(p.n(), 6);
        assert_eq!(p.uniform_r(), Some(2));
        assert!((p.cumulative_fraction(2).unwrap() - 4.0 / 6.0).abs() <= 1e-15);
        assert!(ProtocolParams::uniform(5, 2).is_err());
        assert!(ProtocolParams::uniform(0, 1).is_err());
    }

    #[test]
    fn scheduled_params() {
        let p = ProtocolParams::scheduled(vec![1, 2]).unwrap();
        assert_eq!(p.n(), 3);
        assert_eq!(p.n_rounds(), 2);
        assert_eq!(p.uniform_r(), None);
        assert!((p.cumulative_fraction(1).unwrap() - 1.0 / 3.0).abs() <= 1e-15);
        assert!((p.cumulative_fraction(2).unwrap() - 1.0).abs() <= 1e-15);
        assert!(ProtocolParams::scheduled(vec![]).is_err());
        assert!(ProtocolParams::scheduled(vec![1, 0]).is_err());
    }

    #[test]
    fn context_lifecycle() {
        let params = ProtocolParams::uniform(4, 2).unwrap();
        let ctx = RoundContext::initial(2);
        ctx.validate_for(&params, 2).unwrap();
        let draw = IndexWord::new(vec![0, 1]);
        let next = ctx.advanced(&draw);
        assert_eq!(next.round(), 2);
        assert_eq!(next.counts(), &[1, 1]);
        next.validate_for(&params, 2).unwrap();

        let bad = RoundContext::for_history(&params, IndexWord::new(vec![0]), 2);
        assert!(bad.is_err());
        let ok = RoundContext::for_history(&params, IndexWord::new(vec![1, 1]), 2).unwrap();
        assert_eq!(ok.round(), 2);
    }

    #[test]
    fn sampling_view_identity() {
        let d = QuasiDistribution::from_parts(
            vec![IndexWord::new(vec![0]), IndexWord::new(vec![1])],
            vec![1.3, -0.3],
            0.0,
            2,
        );
        assert!((d.sum() - 1.0).abs() <= 1e-15);
        assert!((d.z() - 1.6).abs() <= 1e-15);
        let view = d.sampling_view();
        assert!((view.q.iter().sum::<f64>() - 1.0).abs() <= 1e-15);
        // Σ q·Z·sign·v = Σ p·v for arbitrary v
        let v = [0.37, -2.2];
        let lhs: f64 = view
            .q
            .iter()
            .zip(view.signs.iter())
            .zip(v.iter())
            .map(|((q, s), val)| q * view.z * s * val)
            .sum();
        let rhs: f64 = d.coeffs().iter().zip(v.iter()).map(|(p, val)| p * val).sum();
        assert!((lhs - rhs).abs() <= 1e-14);
    }
}
