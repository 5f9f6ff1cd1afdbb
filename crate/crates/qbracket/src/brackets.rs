//! Evaluation of mono- and bi-brackets as truncated q-series, the symbolic
//! action of q d/dq, and the reduction of length-1 bi-brackets to derivation
//! towers over mono-brackets.
//!
//! A bi-bracket with upper indices (s_1, ..., s_l) and lower indices
//! (r_1, ..., r_l) is the q-series whose coefficient of q^k sums
//! u_1^{r_1} v_1^{s_1-1} ... / (r_1! (s_1-1)! ...) over all u_1 > ... > u_l > 0
//! and v_i > 0 with sum u_i v_i = k.

use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::arith::Rat;
use crate::bialgebra::{BiWord, Letter, LinComb};
use crate::error::QbracketError;
use crate::qseries::{bracket_factor, QSeries};

/// A bi-bracket index: parallel upper (s, positive) and lower (r,
/// non-negative) index vectors of equal nonzero length.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct BiIndex {
    s: Vec<u32>,
    r: Vec<u32>,
}

impl BiIndex {
    pub fn new(s: Vec<u32>, r: Vec<u32>) -> Result<Self, QbracketError> {
        if s.is_empty() {
            return Err(QbracketError::Domain("empty index".into()));
        }
        if s.len() != r.len() {
            return Err(QbracketError::Domain(format!(
                "upper and lower index lengths differ: {} vs {}",
                s.len(),
                r.len()
            )));
        }
        if s.contains(&0) {
            return Err(QbracketError::Domain("upper indices must be positive".into()));
        }
        Ok(BiIndex { s, r })
    }

    /// Mono-bracket index: all lower indices zero.
    pub fn mono(s: Vec<u32>) -> Result<Self, QbracketError> {
        let r = vec![0; s.len()];
        BiIndex::new(s, r)
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn upper(&self) -> &[u32] {
        &self.s
    }

    pub fn lower(&self) -> &[u32] {
        &self.r
    }

    /// Upper weight S = sum of the s_i.
    pub fn upper_weight(&self) -> u32 {
        self.s.iter().sum()
    }

    /// Lower weight R = sum of the r_i.
    pub fn lower_weight(&self) -> u32 {
        self.r.iter().sum()
    }

    pub fn total_weight(&self) -> u32 {
        self.upper_weight() + self.lower_weight()
    }

    pub fn is_mono(&self) -> bool {
        self.r.iter().all(|&ri| ri == 0)
    }

    pub fn to_word(&self) -> BiWord {
        BiWord::new(
            self.s
                .iter()
                .zip(&self.r)
                .map(|(&s, &r)| Letter { s, r })
                .collect(),
        )
    }

    pub fn from_word(w: &BiWord) -> Result<Self, QbracketError> {
        BiIndex::new(
            w.letters().iter().map(|l| l.s).collect(),
            w.letters().iter().map(|l| l.r).collect(),
        )
    }
}

impl std::fmt::Display for BiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: Vec<String> = self.s.iter().map(u32::to_string).collect();
        if self.is_mono() {
            write!(f, "[{}]", s.join(","))
        } else {
            let r: Vec<String> = self.r.iter().map(u32::to_string).collect();
            write!(f, "[{}\\{}]", s.join(","), r.join(","))
        }
    }
}

/// Evaluate the bi-bracket as a series truncated at `precision`.
///
/// Descending-u dynamic programming: with F_i(n) the partial sum over chains
/// u_i > ... > u_l whose largest index is at most n,
/// F_i(n) = F_i(n-1) + factor_i(n) * F_{i+1}(n-1). Every factor's lowest
/// power is q^n, so n ranges over 1..=precision.
///
/// ```
/// use qbracket::brackets::{bi_bracket, BiIndex};
///
/// let idx = BiIndex::new(vec![1, 1], vec![1, 0]).unwrap();
/// let series = bi_bracket(&idx, 5);
/// assert_eq!(series.to_string(), "2*q^3 + 5*q^4 + 14*q^5 + O(q^6)");
/// ```
pub fn bi_bracket(idx: &BiIndex, precision: usize) -> QSeries {
    let l = idx.len();
    let mut prev: Vec<QSeries> = (0..=precision + 1).map(|_| QSeries::one(precision)).collect();
    for i in (0..l).rev() {
        let mut cur = Vec::with_capacity(precision + 2);
        cur.push(QSeries::zero(precision));
        for n in 1..=precision {
            let factor = bracket_factor(n, idx.s[i], idx.r[i], precision);
            let term = &factor * &prev[n - 1];
            cur.push(&cur[n - 1] + &term);
        }
        // sentinel so prev[n] is valid for n = precision + 1
        cur.push(cur[precision].clone());
        prev = cur;
    }
    prev[precision].clone()
}

/// Mono-bracket: bi-bracket with all lower indices zero.
pub fn mono_bracket(s: &[u32], precision: usize) -> Result<QSeries, QbracketError> {
    Ok(bi_bracket(&BiIndex::mono(s.to_vec())?, precision))
}

/// The image of a bi-bracket under q d/dq, as a linear combination of
/// bi-brackets of the same length:
/// sum_k s_k (r_k + 1) [.., s_k + 1, .. \ .., r_k + 1, ..].
pub fn d_q_symbolic(idx: &BiIndex) -> LinComb {
    let mut out = LinComb::zero();
    for k in 0..idx.len() {
        let mut s = idx.s.clone();
        let mut r = idx.r.clone();
        let coeff = Rat::from(s[k]) * Rat::from(r[k] + 1);
        s[k] += 1;
        r[k] += 1;
        let word = BiIndex::new(s, r).expect("shifted index stays valid").to_word();
        out.add_term(word, coeff);
    }
    out
}

/// constant * d_q^power [base]: the normal form of a length-1 bi-bracket.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DerivationTower {
    pub constant: Rat,
    pub power: u32,
    pub base: u32,
}

impl DerivationTower {
    /// Evaluate the tower as a series.
    pub fn evaluate(&self, precision: usize) -> QSeries {
        let mut ser = bi_bracket(
            &BiIndex::mono(vec![self.base]).expect("base >= 1"),
            precision,
        );
        for _ in 0..self.power {
            ser = ser.q_d_dq();
        }
        ser.scale(&self.constant)
    }
}

/// Reduce a length-1 bi-bracket [s \ r] to C * d_q^p [m].
///
/// When s <= r, the l = 1 partition swap [s \ r] = [r+1 \ s-1] is applied
/// first, after which the upper index exceeds the lower one. Then
/// [a \ p] = d_q^p [a - p] / (p! (a-1)(a-2)...(a-p)).
pub fn length1_reduce(s: u32, r: u32) -> Result<DerivationTower, QbracketError> {
    if s == 0 {
        return Err(QbracketError::Domain("upper index must be positive".into()));
    }
    let (a, p) = if s > r { (s, r) } else { (r + 1, s - 1) };
    // repeated d_q: [a \ p] = (1 / (p (a-1))) d_q [a-1 \ p-1]
    let mut constant = Rat::one();
    for k in 0..p {
        constant = constant / (Rat::from(p - k) * Rat::from(a - 1 - k));
    }
    Ok(DerivationTower {
        constant,
        power: p,
        base: a - p,
    })
}

/// Rat-weighted sum of bi-bracket evaluations over the words of a linear
/// combination. The empty word evaluates to the constant series 1.
pub fn evaluate(lc: &LinComb, precision: usize) -> QSeries {
    let mut acc = QSeries::zero(precision);
    for (word, coeff) in lc.terms() {
        let ser = if word.is_empty() {
            QSeries::one(precision)
        } else {
            let idx = BiIndex::from_word(word).expect("words in a LinComb are valid");
            bi_bracket(&idx, precision)
        };
        acc = &acc + &ser.scale(coeff);
    }
    acc
}

/// Shared evaluation cache for sweeps that revisit the same brackets many
/// times. Results are keyed on (index, precision).
#[derive(Default)]
pub struct BracketCache {
    map: Mutex<HashMap<(BiIndex, usize), QSeries>>,
}

impl BracketCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bi_bracket(&self, idx: &BiIndex, precision: usize) -> QSeries {
        if let Some(hit) = self.map.lock().unwrap().get(&(idx.clone(), precision)) {
            return hit.clone();
        }
        let ser = bi_bracket(idx, precision);
        self.map
            .lock()
            .unwrap()
            .insert((idx.clone(), precision), ser.clone());
        ser
    }

    pub fn evaluate(&self, lc: &LinComb, precision: usize) -> QSeries {
        let mut acc = QSeries::zero(precision);
        for (word, coeff) in lc.terms() {
            let ser = if word.is_empty() {
                QSeries::one(precision)
            } else {
                let idx = BiIndex::from_word(word).expect("words in a LinComb are valid");
                self.bi_bracket(&idx, precision)
            };
            acc = &acc + &ser.scale(coeff);
        }
        acc
    }
}
