//! Closed-form round distributions for two-term Hamiltonians.
//!
//! These are the published reference solutions for small (N, r); the
//! library treats the first-principles solver as the source of truth and
//! keeps these hard-coded forms exclusively as test oracles. Subscripts
//! are read innermost-first, matching the word convention. Known caveat:
//! for the (N=3, schedule [1,2]) round-2 case the solver agrees with the
//! published values only up to swapping the two mixed words; the
//! comparison harness reports that discrepancy rather than patching it.

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::words::IndexWord;

use super::{QuasiDistribution, RoundContext};

/// Which published closed form to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormVariant {
    /// (N=2, r=1), round 2, history = one draw.
    N2R1Round2,
    /// (N=2, r=2), round 1, empty history.
    N2R2Round1,
    /// (N=3, schedule [1, 2]), round 2, history = one draw.
    N3ScheduleRound2,
    /// (N=3, r=3), round 1, empty history.
    N3R3Round1,
}

fn two_weights(h: &Hamiltonian) -> Result<(f64, f64, f64)> {
    if h.n_terms() != 2 {
        return Err(Error::ClosedFormShape(format!(
            "closed forms require L = 2, got L = {}",
            h.n_terms()
        )));
    }
    let w = h.weights();
    Ok((w[0], w[1], w[0] + w[1]))
}

fn single_draw_history(ctx: &RoundContext) -> Result<usize> {
    if ctx.round() != 2 || ctx.history().len() != 1 {
        return Err(Error::ClosedFormShape(format!(
            "variant expects round 2 with a single drawn operator, got round {} with history [{}]",
            ctx.round(),
            ctx.history()
        )));
    }
    Ok(ctx.history().letters()[0])
}

/// The published distribution for the given variant. `ctx` must have the
/// variant-appropriate shape.
pub fn closed_form(
    variant: ClosedFormVariant,
    h: &Hamiltonian,
    ctx: &RoundContext,
) -> Result<QuasiDistribution> {
    let (h1, h2, lambda) = two_weights(h)?;
    let weights = [h1, h2];

    match variant {
        ClosedFormVariant::N2R1Round2 => {
            let i = single_draw_history(ctx)?;
            let o = 1 - i;
            let mut coeffs = [0.0; 2];
            coeffs[i] = (weights[i] - weights[o]) / lambda;
            coeffs[o] = 2.0 * weights[o] / lambda;
            Ok(QuasiDistribution::from_parts(
                vec![IndexWord::new(vec![0]), IndexWord::new(vec![1])],
                coeffs.to_vec(),
                0.0,
                2,
            ))
        }
        ClosedFormVariant::N2R2Round1 => {
            if ctx.round() != 1 || !ctx.history().is_empty() {
                return Err(Error::ClosedFormShape(
                    "variant expects round 1 with an empty history".into(),
                ));
            }
            let l2 = lambda * lambda;
            let candidates = vec![
                IndexWord::new(vec![0, 0]),
                IndexWord::new(vec![0, 1]),
                IndexWord::new(vec![1, 0]),
                IndexWord::new(vec![1, 1]),
            ];
            let coeffs = vec![
                h1 * (h1 - h2) / l2,
                2.0 * h1 * h2 / l2,
                2.0 * h1 * h2 / l2,
                h2 * (h2 - h1) / l2,
            ];
            Ok(QuasiDistribution::from_parts(candidates, coeffs, 0.0, 4))
        }
        ClosedFormVariant::N3ScheduleRound2 => {
            let i = single_draw_history(ctx)?;
            let o = 1 - i;
            let (hi, ho) = (weights[i], weights[o]);
            let s2 = (3.0 / lambda) * (3.0 / lambda);
            // published as: p_ii, p_oo, p_io = s²/2 · h_i h_o,
            // p_oi = s²/2 · (h_i h_o - 2λh_o/3); the solver swaps the two
            // mixed entries relative to this assignment
            let mut table = vec![0.0; 4];
            let idx = |a: usize, b: usize| a * 2 + b;
            table[idx(i, i)] = 0.5 * s2 * (9.0 * hi * hi + 2.0 * lambda * lambda - 9.0 * lambda * hi) / 9.0;
            table[idx(o, o)] = 0.5 * s2 * (3.0 * ho * ho - lambda * ho) / 3.0;
            table[idx(i, o)] = 0.5 * s2 * hi * ho;
            table[idx(o, i)] = 0.5 * s2 * (hi * ho - 2.0 / 3.0 * lambda * ho);
            let candidates = vec![
                IndexWord::new(vec![0, 0]),
                IndexWord::new(vec![0, 1]),
                IndexWord::new(vec![1, 0]),
                IndexWord::new(vec![1, 1]),
            ];
            let coeffs = vec![table[0], table[1], table[2], table[3]];
            Ok(QuasiDistribution::from_parts(candidates, coeffs, 0.0, 4))
        }
        ClosedFormVariant::N3R3Round1 => {
            if ctx.round() != 1 || !ctx.history().is_empty() {
                return Err(Error::ClosedFormShape(
                    "variant expects round 1 with an empty history".into(),
                ));
            }
            let a = |i: usize| 3.0 * weights[i] / lambda;
            let mut candidates = Vec::with_capacity(8);
            let mut coeffs = Vec::with_capacity(8);
            for w1 in 0..2usize {
                for w2 in 0..2usize {
                    for w3 in 0..2usize {
                        candidates.push(IndexWord::new(vec![w1, w2, w3]));
                        coeffs.push(published_triple(a(w1), a(w2), a(w3), (w1, w2, w3)));
                    }
                }
            }
            Ok(QuasiDistribution::from_parts(candidates, coeffs, 0.0, 8))
        }
    }
}

/// Published (N=3, r=3) coefficients by word pattern, with x_k = 3h_{w_k}/λ.
fn published_triple(x1: f64, x2: f64, x3: f64, pattern: (usize, usize, usize)) -> f64 {
    let (w1, w2, w3) = pattern;
    if w1 == w2 && w2 == w3 {
        // p_iii = x³/6 - x²/2 + x/3
        x1 * x1 * x1 / 6.0 - x1 * x1 / 2.0 + x1 / 3.0
    } else if w2 == w3 {
        // p_ijj = x_i x_j²/6 - x_i x_j/4
        x1 * x2 * x2 / 6.0 - x1 * x2 / 4.0
    } else if w1 == w2 {
        // p_iij = x_i² x_j/6 - x_i x_j/4
        x1 * x1 * x3 / 6.0 - x1 * x3 / 4.0
    } else {
        // p_iji = x_i² x_j/6
        x1 * x1 * x2 / 6.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::build_tfim;
    use crate::qshift::{
        assemble_round_system, solve_round, ProtocolParams, RoundContext,
    };

    #[test]
    fn first_order_round2_sums_to_one_and_matches_solver() {
        let h = build_tfim(2, 1.0, 0.1).unwrap();
        let params = ProtocolParams::uniform(2, 1).unwrap();
        for first in 0..2usize {
            let ctx =
                RoundContext::for_history(&params, IndexWord::new(vec![first]), 2).unwrap();
            let oracle = closed_form(ClosedFormVariant::N2R1Round2, &h, &ctx).unwrap();
            assert!((oracle.sum() - 1.0).abs() <= 1e-12);
            let solved = solve_round(&assemble_round_system(&h, &params, &ctx).unwrap()).unwrap();
            for (w, c) in oracle.iter() {
                assert!((solved.coeff(w) - c).abs() <= 1e-10, "word {w}");
            }
        }
    }

    #[test]
    fn pair_round_matches_solver() {
        let h = build_tfim(2, 0.9, 0.4).unwrap();
        let params = ProtocolParams::uniform(2, 2).unwrap();
        let ctx = RoundContext::initial(2);
        let oracle = closed_form(ClosedFormVariant::N2R2Round1, &h, &ctx).unwrap();
        assert!((oracle.sum() - 1.0).abs() <= 1e-12);
        let solved = solve_round(&assemble_round_system(&h, &params, &ctx).unwrap()).unwrap();
        for (w, c) in oracle.iter() {
            assert!((solved.coeff(w) - c).abs() <= 1e-10, "word {w}");
        }
    }

    #[test]
    fn triple_round_matches_solver() {
        let h = build_tfim(2, 1.0, 0.1).unwrap();
        let params = ProtocolParams::uniform(3, 3).unwrap();
        let ctx = RoundContext::initial(2);
        let oracle = closed_form(ClosedFormVariant::N3R3Round1, &h, &ctx).unwrap();
        assert!(
            (oracle.sum() - 1.0).abs() <= 1e-12,
            "sum = {}",
            oracle.sum()
        );
        let solved = solve_round(&assemble_round_system(&h, &params, &ctx).unwrap()).unwrap();
        for (w, c) in oracle.iter() {
            assert!(
                (solved.coeff(w) - c).abs() <= 1e-10,
                "word {w}: {} vs {c}",
                solved.coeff(w)
            );
        }
    }

    #[test]
    fn mixed_schedule_round2_mixed_words_swap_against_solver() {
        // the diagonal words agree; the published mixed-word assignment is
        // the reverse of the solver's
        let h = build_tfim(2, 0.7, 0.3).unwrap();
        let params = ProtocolParams::scheduled(vec![1, 2]).unwrap();
        let ctx = RoundContext::for_history(&params, IndexWord::new(vec![0]), 2).unwrap();
        let oracle = closed_form(ClosedFormVariant::N3ScheduleRound2, &h, &ctx).unwrap();
        assert!((oracle.sum() - 1.0).abs() <= 1e-12);
        let solved = solve_round(&assemble_round_system(&h, &params, &ctx).unwrap()).unwrap();
        let same = |w: &[usize]| {
            let word = IndexWord::new(w.to_vec());
            (solved.coeff(&word) - oracle.coeff(&word)).abs() <= 1e-10
        };
        assert!(same(&[0, 0]));
        assert!(same(&[1, 1]));
        assert!(!same(&[0, 1]));
        assert!(!same(&[1, 0]));
        let w01 = IndexWord::new(vec![0, 1]);
        let w10 = IndexWord::new(vec![1, 0]);
        assert!((solved.coeff(&w01) - oracle.coeff(&w10)).abs() <= 1e-10);
        assert!((solved.coeff(&w10) - oracle.coeff(&w01)).abs() <= 1e-10);
    }

    #[test]
    fn shape_errors() {
        let h = build_tfim(2, 1.0, 0.1).unwrap();
        let ctx = RoundContext::initial(2);
        assert!(closed_form(ClosedFormVariant::N2R1Round2, &h, &ctx).is_err());
        let h3 = {
            use crate::hamiltonian::{Hamiltonian, HermitianTerm};
            use crate::pauli::PauliString;
            let t = |s: &str| {
                HermitianTerm::from_pauli_summands(s, 1.0, 2, vec![PauliString::parse(s).unwrap()])
                    .unwrap()
            };
            Hamiltonian::new(vec![t("ZZ"), t("XI"), t("IX")]).unwrap()
        };
        assert!(closed_form(ClosedFormVariant::N2R2Round1, &h3, &ctx).is_err());
    }
}
