//! Formal Taylor algebra over ordered index words.
//!
//! Conjugating an observable by a product of term exponentials expands as
//!
//!   U†QU = Σ_w (i·t)^|w| · c_w · Comm(w, Q) + O(t^{max_order+1}),
//!
//! where w ranges over ordered words of term indices,
//! Comm(w, Q) = [H_{w_k}, ..., [H_{w_1}, Q]...] with letters read
//! innermost-first (letters[0] sits next to Q), and the coefficients c_w
//! are sums of reciprocal-factorial products over the ways the slots of U
//! can emit the word as consecutive blocks. Matching these coefficients
//! word-by-word against the target conjugation e^{iτtH} Q e^{-iτtH} is
//! what drives the adaptive round systems.
//!
//! The innermost-first letter convention is fixed once, here; every other
//! module conforms to it. Letters are 0-based term indices internally and
//! 1-based on every user-facing surface.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exact::ObservableSpec;
use crate::hamiltonian::Hamiltonian;
use crate::linalg::CMatrix;
use crate::policy::policy;

/// Hard cap on expansion order; double precision with 1e-14 pruning is the
/// accuracy contract and is justified only for orders up to this.
pub const MAX_ORDER_CAP: usize = 8;

/// Cap on nested-commutator realization length (matrix cost guard).
pub const REALIZE_CAP: usize = 6;

/// An ordered word of term indices; letters[0] is the innermost commutator
/// index. Ordered by length first, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IndexWord {
    letters: Vec<usize>,
}

impl IndexWord {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(letters: Vec<usize>) -> Self {
        Self { letters }
    }

    /// Parse 1-based letters (the user-facing convention).
    pub fn from_one_based(letters: &[usize]) -> Result<Self> {
        let mut out = Vec::with_capacity(letters.len());
        for &l in letters {
            if l == 0 {
                return Err(Error::LetterOutOfRange {
                    letter: 0,
                    count: 0,
                });
            }
            out.push(l - 1);
        }
        Ok(Self { letters: out })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    /// New word with `count` copies of `letter` appended on the outer end.
    pub fn with_block(&self, letter: usize, count: usize) -> Self {
        let mut letters = self.letters.clone();
        letters.extend(std::iter::repeat(letter).take(count));
        Self { letters }
    }

    /// Concatenation self ⊕ other (other on the outer end).
    pub fn concat(&self, other: &IndexWord) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Self { letters }
    }

    /// Per-letter occurrence counts over an alphabet of `l` letters.
    pub fn histogram(&self, l: usize) -> Vec<usize> {
        let mut counts = vec![0usize; l];
        for &letter in &self.letters {
            counts[letter] += 1;
        }
        counts
    }

    pub fn validate_letters(&self, l: usize) -> Result<()> {
        for &letter in &self.letters {
            if letter >= l {
                return Err(Error::LetterOutOfRange {
                    letter: letter + 1,
                    count: l,
                });
            }
        }
        Ok(())
    }
}

impl PartialOrd for IndexWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for IndexWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl std::fmt::Display for IndexWord {
    /// 1-based, comma separated; the empty word prints as "-".
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "-");
        }
        let parts: Vec<String> = self.letters.iter().map(|l| (l + 1).to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Formal series Σ_w (i·t)^|w| · coeffs[w] · Comm(w, Q), truncated at
/// max_order. Coefficients below the prune tolerance are dropped; the
/// empty word is always present.
#[derive(Debug, Clone, PartialEq)]
pub struct WordSeries {
    coeffs: BTreeMap<IndexWord, f64>,
    max_order: usize,
}

impl WordSeries {
    /// The identity-circuit series: only the empty word, coefficient 1.
    pub fn identity(max_order: usize) -> Result<Self> {
        check_order(max_order)?;
        let mut coeffs = BTreeMap::new();
        coeffs.insert(IndexWord::empty(), 1.0);
        Ok(Self { coeffs, max_order })
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn coeff(&self, w: &IndexWord) -> f64 {
        self.coeffs.get(w).copied().unwrap_or(0.0)
    }

    pub fn coeffs(&self) -> &BTreeMap<IndexWord, f64> {
        &self.coeffs
    }

    fn prune(&mut self) {
        let tol = policy().prune_tol;
        self.coeffs
            .retain(|w, c| w.is_empty() || c.abs() >= tol);
        self.coeffs.entry(IndexWord::empty()).or_insert(0.0);
    }
}

fn check_order(max_order: usize) -> Result<()> {
    if max_order > MAX_ORDER_CAP {
        return Err(Error::OrderCap {
            order: max_order,
            cap: MAX_ORDER_CAP,
        });
    }
    Ok(())
}

/// Word coefficients of U†QU for U described by `slots`, where slots[0]
/// names the exponential whose conjugation acts innermost (next to Q) and
/// every exponential carries angle `angle_scale · t`.
///
/// c_w = angle_scale^|w| · Σ over compositions slots[0]^{n_1}...slots[m]^{n_m} = w
/// of Π_j 1/n_j!, built by appending one slot's block at a time.
pub fn conjugation_coefficients(
    slots: &[usize],
    angle_scale: f64,
    max_order: usize,
) -> Result<WordSeries> {
    check_order(max_order)?;
    let mut series = WordSeries::identity(max_order)?;
    for &slot in slots {
        let mut next: BTreeMap<IndexWord, f64> = BTreeMap::new();
        for (word, c) in &series.coeffs {
            let mut block_coeff = 1.0;
            for n in 0..=(max_order - word.len()) {
                if n > 0 {
                    block_coeff *= angle_scale / n as f64;
                }
                let grown = word.with_block(slot, n);
                *next.entry(grown).or_insert(0.0) += c * block_coeff;
            }
        }
        series.coeffs = next;
        series.prune();
    }
    Ok(series)
}

/// Word coefficients of the target conjugation e^{iτtH} Q e^{-iτtH}:
/// c_w = τ^|w| · (Π_j h_{w_j}) / |w|! for every word over the term alphabet.
pub fn target_coefficients(
    h: &Hamiltonian,
    tau_ratio: f64,
    max_order: usize,
) -> Result<WordSeries> {
    check_order(max_order)?;
    let weights = h.weights();
    let mut series = WordSeries::identity(max_order)?;
    let mut frontier = vec![(IndexWord::empty(), 1.0f64)];
    let mut factorial = 1.0;
    for order in 1..=max_order {
        factorial *= order as f64;
        let mut next = Vec::with_capacity(frontier.len() * weights.len());
        for (word, weight_product) in &frontier {
            for (i, &hw) in weights.iter().enumerate() {
                let grown = word.with_block(i, 1);
                let prod = weight_product * hw;
                series
                    .coeffs
                    .insert(grown.clone(), tau_ratio.powi(order as i32) * prod / factorial);
                next.push((grown, prod));
            }
        }
        frontier = next;
    }
    series.prune();
    Ok(series)
}

/// All words of exactly `len` letters over an alphabet of `l` letters,
/// in lexicographic order.
pub fn all_words(l: usize, len: usize) -> Vec<IndexWord> {
    let mut out = vec![IndexWord::empty()];
    for _ in 0..len {
        let mut grown = Vec::with_capacity(out.len() * l);
        for w in &out {
            for letter in 0..l {
                grown.push(w.with_block(letter, 1));
            }
        }
        out = grown;
    }
    out
}

/// Dense realization of Comm(w, Q) = [H_{w_k}, ..., [H_{w_1}, Q]...] with
/// unit-scale generators. Validation aid only; guarded by a length cap.
pub fn realize_commutator(
    word: &IndexWord,
    h: &Hamiltonian,
    q: &ObservableSpec,
) -> Result<CMatrix> {
    if word.len() > REALIZE_CAP {
        return Err(Error::WordLengthCap {
            len: word.len(),
            cap: REALIZE_CAP,
        });
    }
    word.validate_letters(h.n_terms())?;
    let mut m = q.operator().matrix().clone();
    for &letter in word.letters() {
        let gen = h.terms()[letter].operator().matrix();
        m = gen * &m - &m * gen;
    }
    Ok(m)
}
