//! The formal word algebra of bi-brackets: words over the letters z_{s,r},
//! rational linear combinations, the stuffle product, the partition relation
//! at arbitrary length, the shuffle product derived from it, and the altered
//! products with lower-length words removed.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{binomial, lambda_coeff_raw, Rat};
use crate::error::QbracketError;

/// One letter z_{s,r} with s > 0, r >= 0.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Letter {
    pub s: u32,
    pub r: u32,
}

impl Letter {
    pub fn new(s: u32, r: u32) -> Self {
        assert!(s >= 1, "letter upper index must be positive");
        Letter { s, r }
    }

    pub fn weight(&self) -> u32 {
        self.s + self.r
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z[{},{}]", self.s, self.r)
    }
}

/// A word in the letters z_{s,r}; the empty word is the unit of both
/// products.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct BiWord {
    letters: Vec<Letter>,
}

impl BiWord {
    pub fn unit() -> Self {
        BiWord { letters: vec![] }
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        BiWord { letters }
    }

    pub fn letter(s: u32, r: u32) -> Self {
        BiWord {
            letters: vec![Letter::new(s, r)],
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.letters.iter().map(Letter::weight).sum()
    }

    pub fn upper_weight(&self) -> u32 {
        self.letters.iter().map(|l| l.s).sum()
    }

    pub fn lower_weight(&self) -> u32 {
        self.letters.iter().map(|l| l.r).sum()
    }

    /// Word with `letter` prepended.
    pub fn prepend(&self, letter: Letter) -> Self {
        let mut letters = Vec::with_capacity(self.letters.len() + 1);
        letters.push(letter);
        letters.extend_from_slice(&self.letters);
        BiWord { letters }
    }

    fn split_first(&self) -> Option<(Letter, BiWord)> {
        self.letters.split_first().map(|(head, tail)| {
            (
                *head,
                BiWord {
                    letters: tail.to_vec(),
                },
            )
        })
    }
}

impl fmt::Display for BiWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        let s: Vec<String> = self.letters.iter().map(|l| l.s.to_string()).collect();
        let r: Vec<String> = self.letters.iter().map(|l| l.r.to_string()).collect();
        write!(f, "[{}\\{}]", s.join(","), r.join(","))
    }
}

/// Finite Rat-weighted formal sum of words, canonically ordered, with zero
/// coefficients removed eagerly.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LinComb {
    terms: BTreeMap<BiWord, Rat>,
}

impl LinComb {
    pub fn zero() -> Self {
        LinComb {
            terms: BTreeMap::new(),
        }
    }

    pub fn unit() -> Self {
        LinComb::from_word(BiWord::unit())
    }

    pub fn from_word(w: BiWord) -> Self {
        let mut lc = LinComb::zero();
        lc.add_term(w, Rat::one());
        lc
    }

    pub fn add_term(&mut self, w: BiWord, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add(&self, rhs: &LinComb) -> LinComb {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> LinComb {
        if c.is_zero() {
            return LinComb::zero();
        }
        LinComb {
            terms: self
                .terms
                .iter()
                .map(|(w, a)| (w.clone(), a * c))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &LinComb) -> LinComb {
        self.add(&rhs.scale(&-Rat::one()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BiWord, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, w: &BiWord) -> Rat {
        self.terms.get(w).cloned().unwrap_or_else(Rat::zero)
    }

    /// Concatenate `head` in front of every word.
    pub fn prepend(&self, head: Letter) -> LinComb {
        LinComb {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.prepend(head), c.clone()))
                .collect(),
        }
    }

    /// Keep only words of length >= `min_len`. The altered products of the
    /// odd-weight machinery are full products passed through this filter.
    pub fn truncate_lower_lengths(&self, min_len: usize) -> LinComb {
        LinComb {
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() >= min_len)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Keep only words of length exactly `len`.
    pub fn filter_length(&self, len: usize) -> LinComb {
        LinComb {
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() == len)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for LinComb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "{w}")?;
            } else {
                write!(f, "{c}*{w}")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coeff: Rat,
    word: WordRepr,
}

#[derive(Serialize, Deserialize)]
struct WordRepr {
    s: Vec<u32>,
    r: Vec<u32>,
}

impl Serialize for LinComb {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let reprs: Vec<TermRepr> = self
            .terms
            .iter()
            .map(|(w, c)| TermRepr {
                coeff: c.clone(),
                word: WordRepr {
                    s: w.letters.iter().map(|l| l.s).collect(),
                    r: w.letters.iter().map(|l| l.r).collect(),
                },
            })
            .collect();
        reprs.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for LinComb {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let reprs = Vec::<TermRepr>::deserialize(de)?;
        let mut lc = LinComb::zero();
        for t in reprs {
            if t.word.s.len() != t.word.r.len() {
                return Err(serde::de::Error::custom("word s/r length mismatch"));
            }
            let letters = t
                .word
                .s
                .iter()
                .zip(&t.word.r)
                .map(|(&s, &r)| {
                    if s == 0 {
                        Err(serde::de::Error::custom("letter upper index must be positive"))
                    } else {
                        Ok(Letter { s, r })
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            lc.add_term(BiWord::new(letters), t.coeff);
        }
        Ok(lc)
    }
}

/// The diamond product of two letters:
/// z_{s1,r1} <> z_{s2,r2} = C(r1+r2, r1) ( z_{s1+s2, r1+r2}
///   + sum_{j=1}^{s1} lambda^j_{s1,s2} z_{j, r1+r2}
///   + sum_{j=1}^{s2} lambda^j_{s2,s1} z_{j, r1+r2} ).
pub fn diamond(a: Letter, b: Letter) -> LinComb {
    let pre = binomial((a.r + b.r) as i64, a.r as i64);
    let rr = a.r + b.r;
    let mut out = LinComb::zero();
    out.add_term(BiWord::letter(a.s + b.s, rr), pre.clone());
    for j in 1..=a.s {
        out.add_term(
            BiWord::letter(j, rr),
            pre.clone() * lambda_coeff_raw(a.s, b.s, j),
        );
    }
    for j in 1..=b.s {
        out.add_term(
            BiWord::letter(j, rr),
            pre.clone() * lambda_coeff_raw(b.s, a.s, j),
        );
    }
    out
}

fn stuffle_words(v: &BiWord, w: &BiWord) -> LinComb {
    match (v.split_first(), w.split_first()) {
        (None, _) => LinComb::from_word(w.clone()),
        (_, None) => LinComb::from_word(v.clone()),
        (Some((a, v_tail)), Some((b, w_tail))) => {
            let mut out = stuffle_words(&v_tail, w).prepend(a);
            out = out.add(&stuffle_words(v, &w_tail).prepend(b));
            let rest = stuffle_words(&v_tail, &w_tail);
            for (head, c) in diamond(a, b).terms() {
                debug_assert_eq!(head.len(), 1);
                out = out.add(&rest.prepend(head.letters()[0]).scale(c));
            }
            out
        }
    }
}

/// The stuffle product, extended bilinearly. The empty word is neutral.
///
/// ```
/// use qbracket::bialgebra::{stuffle, BiWord, LinComb};
///
/// let z2 = LinComb::from_word(BiWord::letter(2, 0));
/// let square = stuffle(&z2, &z2);
/// assert_eq!(square.to_string(), "-1/6*[2\\0] + 2*[2,2\\0,0] + [4\\0]");
/// ```
pub fn stuffle(v: &LinComb, w: &LinComb) -> LinComb {
    let mut out = LinComb::zero();
    for (vw, vc) in v.terms() {
        for (ww, wc) in w.terms() {
            out = out.add(&stuffle_words(vw, ww).scale(&(vc * wc)));
        }
    }
    out
}

/// Sparse polynomial in several variables with Rat coefficients, keyed by
/// exponent vectors. Internal carrier for the partition substitution.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = MultiPoly::zero();
        p.add_term(vec![0; nvars], c);
        p
    }

    /// Linear form sum_i coeffs[i] * x_i.
    pub fn linear(coeffs: &[i64]) -> Self {
        let mut p = MultiPoly::zero();
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                let mut e = vec![0; coeffs.len()];
                e[i] = 1;
                p.add_term(e, Rat::from(c));
            }
        }
        p
    }

    pub fn add_term(&mut self, expo: Vec<u32>, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(expo) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn mul(&self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let expo = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(expo, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, n: u32, nvars: usize) -> MultiPoly {
        let mut acc = MultiPoly::constant(nvars, Rat::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn coeff(&self, expo: &[u32]) -> Rat {
        self.terms.get(expo).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }
}

/// The substituted monomial of a length-l word w': in 2l variables
/// X_1..X_l, Y_1..Y_l,
///   prod_i (Y_1 + ... + Y_{l+1-i})^{s'_i - 1}
///   * X_l^{r'_1} * prod_{i>=2} (X_{l-i+1} - X_{l-i+2})^{r'_i}.
///
/// Its expansion in plain monomials carries the partition coefficients.
fn substituted_monomial(w: &BiWord) -> MultiPoly {
    let l = w.len();
    let nvars = 2 * l;
    // variable layout: 0..l are X_1..X_l, l..2l are Y_1..Y_l
    let mut acc = MultiPoly::constant(nvars, Rat::one());
    for (i, letter) in w.letters.iter().enumerate() {
        // (Y_1 + ... + Y_{l - i})^{s_i - 1}   (i is 0-based)
        let mut coeffs = vec![0i64; nvars];
        for y in 0..(l - i) {
            coeffs[l + y] = 1;
        }
        acc = acc.mul(&MultiPoly::linear(&coeffs).pow(letter.s - 1, nvars));
    }
    for (i, letter) in w.letters.iter().enumerate() {
        // i = 0: X_l^{r_1}; i >= 1: (X_{l-i} - X_{l-i+1})^{r_{i+1}}
        let mut coeffs = vec![0i64; nvars];
        if i == 0 {
            coeffs[l - 1] = 1;
        } else {
            coeffs[l - i - 1] = 1;
            coeffs[l - i] = -1;
        }
        acc = acc.mul(&MultiPoly::linear(&coeffs).pow(letter.r, nvars));
    }
    acc
}

/// Exponent vector of a word's own monomial X^{s-1} Y^{r} in the layout of
/// [`substituted_monomial`].
fn word_exponents(w: &BiWord) -> Vec<u32> {
    let l = w.len();
    let mut e = vec![0u32; 2 * l];
    for (i, letter) in w.letters.iter().enumerate() {
        e[i] = letter.s - 1;
        e[l + i] = letter.r;
    }
    e
}

/// The partition relation P applied to a single non-empty word.
///
/// Every word w' of the conjugate bidegree (upper weight R + l, lower weight
/// S - l, same length) contributes the coefficient of w's monomial in the
/// expansion of w'-s substituted monomial. P is an involution and the
/// bi-bracket evaluation is invariant under it.
pub fn partition(w: &BiWord) -> Result<LinComb, QbracketError> {
    if w.is_empty() {
        return Err(QbracketError::Domain(
            "partition is defined on non-empty words".into(),
        ));
    }
    Ok(partition_unchecked(w))
}

fn partition_unchecked(w: &BiWord) -> LinComb {
    let l = w.len();
    let target_upper = w.lower_weight() + l as u32;
    let target_lower = w.upper_weight() - l as u32;
    let target = word_exponents(w);
    let mut out = LinComb::zero();
    for cand in words_of_bidegree(target_upper, target_lower, l) {
        let c = substituted_monomial(&cand).coeff(&target);
        out.add_term(cand, c);
    }
    out
}

/// All words of the exact upper weight, lower weight and length given.
pub fn words_of_bidegree(upper: u32, lower: u32, len: usize) -> Vec<BiWord> {
    let mut out = Vec::new();
    let mut s_parts = Vec::new();
    compositions_positive(upper, len, &mut s_parts, &mut |s| {
        let mut r_parts = Vec::new();
        compositions_nonneg(lower, len, &mut r_parts, &mut |r| {
            let letters = s.iter().zip(r).map(|(&s, &r)| Letter { s, r }).collect();
            out.push(BiWord::new(letters));
        });
    });
    out
}

fn compositions_positive(total: u32, len: usize, cur: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
    if len == 0 {
        if total == 0 {
            f(cur);
        }
        return;
    }
    let reserve = (len - 1) as u32;
    if total < 1 + reserve {
        return;
    }
    for v in 1..=(total - reserve) {
        cur.push(v);
        compositions_positive(total - v, len - 1, cur, f);
        cur.pop();
    }
}

fn compositions_nonneg(total: u32, len: usize, cur: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
    if len == 0 {
        if total == 0 {
            f(cur);
        }
        return;
    }
    for v in 0..=total {
        cur.push(v);
        compositions_nonneg(total - v, len - 1, cur, f);
        cur.pop();
    }
}

/// All words of total weight <= `max_weight` and length <= `max_len`,
/// including the empty word.
pub fn words_of_weight_up_to(max_weight: u32, max_len: usize) -> Vec<BiWord> {
    let mut out = vec![BiWord::unit()];
    for len in 1..=max_len {
        for weight in len as u32..=max_weight {
            for upper in len as u32..=weight {
                out.extend(words_of_bidegree(upper, weight - upper, len));
            }
        }
    }
    out
}

/// Linear extension of the partition relation; the empty word maps to
/// itself.
pub fn partition_lincomb(lc: &LinComb) -> LinComb {
    let mut out = LinComb::zero();
    for (w, c) in lc.terms() {
        if w.is_empty() {
            out.add_term(w.clone(), c.clone());
        } else {
            out = out.add(&partition_unchecked(w).scale(c));
        }
    }
    out
}

/// The shuffle product v sh w = P( P(v) * P(w) ) with P the partition
/// relation and * the stuffle product.
pub fn shuffle(v: &LinComb, w: &LinComb) -> LinComb {
    partition_lincomb(&stuffle(&partition_lincomb(v), &partition_lincomb(w)))
}

/// Closed form of the shuffle product of two letters; used as an oracle for
/// the partition-based route.
pub fn shuffle_letters_closed_form(a: Letter, b: Letter) -> LinComb {
    let (s1, r1, s2, r2) = (a.s as i64, a.r as i64, b.s as i64, b.r as i64);
    let mut out = LinComb::zero();
    for j in 0..=(s1 - 1) {
        for k in 0..=r2 {
            let sign = if k % 2 == 0 { Rat::one() } else { -Rat::one() };
            let c = sign * binomial(r1 + k, k) * binomial(s2 - 1 + j, j);
            let word = BiWord::new(vec![
                Letter::new((s2 + j) as u32, (r2 - k) as u32),
                Letter::new((s1 - j) as u32, (r1 + k) as u32),
            ]);
            out.add_term(word, c);
        }
    }
    for j in 0..=(s2 - 1) {
        for k in 0..=r1 {
            let sign = if k % 2 == 0 { Rat::one() } else { -Rat::one() };
            let c = sign * binomial(r2 + k, k) * binomial(s1 - 1 + j, j);
            let word = BiWord::new(vec![
                Letter::new((s1 + j) as u32, (r1 - k) as u32),
                Letter::new((s2 - j) as u32, (r2 + k) as u32),
            ]);
            out.add_term(word, c);
        }
    }
    let pre = binomial(s1 + s2 - 2, s1 - 1);
    out.add_term(
        BiWord::letter((s1 + s2 - 1) as u32, (r1 + r2 + 1) as u32),
        pre.clone(),
    );
    for j in 0..=a.r {
        out.add_term(
            BiWord::letter((s1 + s2 - 1) as u32, j),
            pre.clone() * lambda_coeff_raw(a.r, b.r + 1, j),
        );
    }
    for j in 0..=b.r {
        out.add_term(
            BiWord::letter((s1 + s2 - 1) as u32, j),
            pre.clone() * lambda_coeff_raw(b.r, a.r + 1, j),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brackets::{bi_bracket, evaluate, BiIndex, BracketCache};

    fn z(s: u32, r: u32) -> LinComb {
        LinComb::from_word(BiWord::letter(s, r))
    }

    fn word(pairs: &[(u32, u32)]) -> BiWord {
        BiWord::new(pairs.iter().map(|&(s, r)| Letter::new(s, r)).collect())
    }

    #[test]
    fn diamond_examples() {
        // z_{2,0} <> z_{2,0} = z_{4,0} - (1/6) z_{2,0}
        let d = diamond(Letter::new(2, 0), Letter::new(2, 0));
        let mut expect = LinComb::zero();
        expect.add_term(BiWord::letter(4, 0), Rat::one());
        expect.add_term(BiWord::letter(2, 0), Rat::new(-1, 6));
        assert_eq!(d, expect);

        // z_{1,1} <> z_{1,1} = 2 z_{2,2} - 2 z_{1,2}
        let d = diamond(Letter::new(1, 1), Letter::new(1, 1));
        let mut expect = LinComb::zero();
        expect.add_term(BiWord::letter(2, 2), Rat::from(2));
        expect.add_term(BiWord::letter(1, 2), Rat::from(-2));
        assert_eq!(d, expect);
    }

    #[test]
    fn diamond_non_admissible_coefficient_vanishes() {
        // coefficient of z_{1, r1+r2} is C(r1+r2, r1)(lambda^1_{s,t} + lambda^1_{t,s}) = 0
        for s in 2..=6 {
            for t in 2..=6 {
                for (r1, r2) in [(0, 0), (1, 2), (3, 1)] {
                    let d = diamond(Letter::new(s, r1), Letter::new(t, r2));
                    assert!(
                        d.coeff(&BiWord::letter(1, r1 + r2)).is_zero(),
                        "({s},{t},{r1},{r2})"
                    );
                }
            }
        }
    }

    #[test]
    fn stuffle_examples() {
        // unit neutral
        let w = z(3, 1);
        assert_eq!(stuffle(&LinComb::unit(), &w), w);
        assert_eq!(stuffle(&w, &LinComb::unit()), w);

        // z_{2,0} * z_{2,0} = 2 z20 z20 + z40 - 1/6 z20
        let p = stuffle(&z(2, 0), &z(2, 0));
        let mut expect = LinComb::zero();
        expect.add_term(word(&[(2, 0), (2, 0)]), Rat::from(2));
        expect.add_term(BiWord::letter(4, 0), Rat::one());
        expect.add_term(BiWord::letter(2, 0), Rat::new(-1, 6));
        assert_eq!(p, expect);
    }

    #[test]
    fn stuffle_worked_row() {
        // [2\2] * [1\0] = z22 z10 + z10 z22 + [3\2] - 1/2 [2\2]
        let p = stuffle(&z(2, 2), &z(1, 0));
        let mut expect = LinComb::zero();
        expect.add_term(word(&[(2, 2), (1, 0)]), Rat::one());
        expect.add_term(word(&[(1, 0), (2, 2)]), Rat::one());
        expect.add_term(BiWord::letter(3, 2), Rat::one());
        expect.add_term(BiWord::letter(2, 2), Rat::new(-1, 2));
        assert_eq!(p, expect);
    }

    #[test]
    fn partition_rejects_empty_word() {
        assert!(partition(&BiWord::unit()).is_err());
    }

    #[test]
    fn partition_length1() {
        for s in 1..=5 {
            for r in 0..=4 {
                let p = partition(&BiWord::letter(s, r)).unwrap();
                assert_eq!(p, LinComb::from_word(BiWord::letter(r + 1, s - 1)));
            }
        }
    }

    #[test]
    fn partition_worked_examples() {
        // [3,1 \ 1,0] -> [1,2 \ 0,2] + [2,1 \ 0,2]
        let p = partition(&word(&[(3, 1), (1, 0)])).unwrap();
        let mut expect = LinComb::zero();
        expect.add_term(word(&[(1, 0), (2, 2)]), Rat::one());
        expect.add_term(word(&[(2, 0), (1, 2)]), Rat::one());
        assert_eq!(p, expect);

        // [2,2 \ 1,1] -> [2,2\1,1] - 2[2,2\0,2] + 2[3,1\1,1] - 4[3,1\0,2]
        let p = partition(&word(&[(2, 1), (2, 1)])).unwrap();
        let mut expect = LinComb::zero();
        expect.add_term(word(&[(2, 1), (2, 1)]), Rat::one());
        expect.add_term(word(&[(2, 0), (2, 2)]), Rat::from(-2));
        expect.add_term(word(&[(3, 1), (1, 1)]), Rat::from(2));
        expect.add_term(word(&[(3, 0), (1, 2)]), Rat::from(-4));
        assert_eq!(p, expect);
    }

    /// Closed form of P on length-2 words (coefficient extraction from the
    /// length-2 generating identity).
    fn partition_l2_closed_form(w: &BiWord) -> LinComb {
        let (a, b) = (w.letters()[0], w.letters()[1]);
        let (s1, r1, s2, r2) = (a.s as i64, a.r as i64, b.s as i64, b.r as i64);
        let mut out = LinComb::zero();
        for j in 0..=r1 {
            for k in 0..=(s2 - 1) {
                let sign = if k % 2 == 0 { Rat::one() } else { -Rat::one() };
                let c = sign * binomial(s1 - 1 + k, k) * binomial(r2 + j, j);
                out.add_term(
                    BiWord::new(vec![
                        Letter::new((r2 + 1 + j) as u32, (s2 - 1 - k) as u32),
                        Letter::new((r1 + 1 - j) as u32, (s1 - 1 + k) as u32),
                    ]),
                    c,
                );
            }
        }
        out
    }

    #[test]
    fn partition_l2_matches_closed_form() {
        for s1 in 1..=3 {
            for s2 in 1..=3 {
                for r1 in 0..=2 {
                    for r2 in 0..=2 {
                        let w = word(&[(s1, r1), (s2, r2)]);
                        assert_eq!(
                            partition(&w).unwrap(),
                            partition_l2_closed_form(&w),
                            "at {w}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn partition_involution() {
        for w in words_of_weight_up_to(7, 3) {
            if w.is_empty() {
                continue;
            }
            let twice = partition_lincomb(&partition(&w).unwrap());
            assert_eq!(twice, LinComb::from_word(w.clone()), "P^2 != id at {w}");
        }
    }

    #[test]
    fn partition_series_invariance() {
        let cache = BracketCache::new();
        for w in words_of_weight_up_to(7, 3) {
            if w.is_empty() {
                continue;
            }
            let idx = BiIndex::from_word(&w).unwrap();
            let lhs = cache.bi_bracket(&idx, 30);
            let rhs = cache.evaluate(&partition(&w).unwrap(), 30);
            assert_eq!(lhs, rhs, "series invariance fails at {w}");
        }
    }

    #[test]
    fn partition_l3_series_instance() {
        let w = word(&[(2, 1), (1, 0), (1, 1)]);
        let p = partition(&w).unwrap();
        let lhs = bi_bracket(&BiIndex::from_word(&w).unwrap(), 30);
        assert_eq!(lhs, evaluate(&p, 30));
    }

    #[test]
    fn shuffle_unit_and_letters() {
        let v = z(2, 2);
        assert_eq!(shuffle(&LinComb::unit(), &v), v);

        // [2\2] sh [1\0] from the worked example
        let got = shuffle(&z(2, 2), &z(1, 0));
        let mut expect = LinComb::zero();
        expect.add_term(word(&[(2, 2), (1, 0)]), Rat::one());
        expect.add_term(word(&[(2, 1), (1, 1)]), Rat::from(-1));
        expect.add_term(word(&[(2, 0), (1, 2)]), Rat::from(2));
        expect.add_term(word(&[(1, 0), (2, 2)]), Rat::one());
        expect.add_term(BiWord::letter(2, 3), Rat::one());
        expect.add_term(BiWord::letter(2, 1), Rat::new(1, 12));
        expect.add_term(BiWord::letter(2, 2), Rat::new(-1, 2));
        assert_eq!(got, expect);
    }

    #[test]
    fn shuffle_matches_closed_form() {
        for s1 in 1..=4 {
            for s2 in 1..=4 {
                for r1 in 0..=3u32 {
                    for r2 in 0..=3u32 {
                        let a = Letter::new(s1, r1);
                        let b = Letter::new(s2, r2);
                        let via_partition =
                            shuffle(&LinComb::from_word(BiWord::new(vec![a])), &LinComb::from_word(BiWord::new(vec![b])));
                        assert_eq!(
                            via_partition,
                            shuffle_letters_closed_form(a, b),
                            "letters ({s1},{r1}) ({s2},{r2})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn shuffle_mono_letters_single_bi_word() {
        // the only word with a nonzero lower index in z_{s,0} sh z_{t,0} is
        // [s+t-1 \ 1] with coefficient C(s+t-2, s-1)
        for s in 1..=5u32 {
            for t in 1..=5u32 {
                let p = shuffle(&z(s, 0), &z(t, 0));
                let mut seen = 0;
                for (w, c) in p.terms() {
                    if w.lower_weight() > 0 {
                        seen += 1;
                        assert_eq!(w, &BiWord::letter(s + t - 1, 1));
                        assert_eq!(
                            c,
                            &binomial((s + t) as i64 - 2, s as i64 - 1),
                            "({s},{t})"
                        );
                    }
                }
                assert_eq!(seen, 1, "({s},{t})");
            }
        }
    }

    #[test]
    fn truncate_lower_lengths_cases() {
        let p = stuffle(&z(2, 0), &z(2, 0));
        let altered = p.truncate_lower_lengths(2);
        let mut expect = LinComb::zero();
        expect.add_term(word(&[(2, 0), (2, 0)]), Rat::from(2));
        assert_eq!(altered, expect);
        assert_eq!(p.truncate_lower_lengths(1), p);
        assert!(z(3, 1).truncate_lower_lengths(2).is_zero());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_letter() -> impl Strategy<Value = Letter> {
            (1u32..=3, 0u32..=2).prop_map(|(s, r)| Letter::new(s, r))
        }

        /// Words of length 1..=2 and weight <= 5.
        fn arb_word() -> impl Strategy<Value = BiWord> {
            proptest::collection::vec(arb_letter(), 1..=2)
                .prop_map(BiWord::new)
                .prop_filter("weight cap", |w| w.weight() <= 5)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn stuffle_commutative(v in arb_word(), w in arb_word()) {
                let lv = LinComb::from_word(v);
                let lw = LinComb::from_word(w);
                prop_assert_eq!(stuffle(&lv, &lw), stuffle(&lw, &lv));
            }

            #[test]
            fn stuffle_associative(u in arb_word(), v in arb_word(), w in arb_word()) {
                let lu = LinComb::from_word(u);
                let lv = LinComb::from_word(v);
                let lw = LinComb::from_word(w);
                prop_assert_eq!(
                    stuffle(&stuffle(&lu, &lv), &lw),
                    stuffle(&lu, &stuffle(&lv, &lw))
                );
            }

            #[test]
            fn partition_involution_random(w in arb_word()) {
                let back = partition_lincomb(&partition(&w).unwrap());
                prop_assert_eq!(back, LinComb::from_word(w));
            }

            #[test]
            fn shuffle_commutative(v in arb_word(), w in arb_word()) {
                let lv = LinComb::from_word(v);
                let lw = LinComb::from_word(w);
                prop_assert_eq!(shuffle(&lv, &lw), shuffle(&lw, &lv));
            }
        }
    }

    #[test]
    fn homomorphism_spot_checks() {
        let cache = BracketCache::new();
        let pairs = [
            (word(&[(2, 0)]), word(&[(2, 0)])),
            (word(&[(2, 2)]), word(&[(1, 0)])),
            (word(&[(2, 1)]), word(&[(1, 1)])),
            (word(&[(1, 1)]), word(&[(1, 1)])),
            (word(&[(2, 0), (1, 0)]), word(&[(2, 0)])),
        ];
        for (v, w) in pairs {
            let prod = &cache.bi_bracket(&BiIndex::from_word(&v).unwrap(), 30)
                * &cache.bi_bracket(&BiIndex::from_word(&w).unwrap(), 30);
            let lv = LinComb::from_word(v.clone());
            let lw = LinComb::from_word(w.clone());
            assert_eq!(
                cache.evaluate(&stuffle(&lv, &lw), 30),
                prod,
                "stuffle homomorphism at {v}, {w}"
            );
            assert_eq!(
                cache.evaluate(&shuffle(&lv, &lw), 30),
                prod,
                "shuffle homomorphism at {v}, {w}"
            );
        }
    }

    #[test]
    fn lincomb_json_canonical() {
        let mut lc = LinComb::zero();
        lc.add_term(word(&[(2, 0), (1, 1)]), Rat::new(-1, 6));
        lc.add_term(word(&[(1, 0)]), Rat::from(3));
        let js = serde_json::to_string(&lc).unwrap();
        assert_eq!(
            js,
            r#"[{"coeff":"3","word":{"s":[1],"r":[0]}},{"coeff":"-1/6","word":{"s":[2,1],"r":[0,1]}}]"#
        );
        let back: LinComb = serde_json::from_str(&js).unwrap();
        assert_eq!(back, lc);
    }
}
