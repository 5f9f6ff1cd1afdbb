//! Classical-side machinery: multiple zeta value indices and duals, the
//! two-letter word algebra with shuffle and the duality anti-automorphism,
//! multiple harmonic sums with the exact finite-N stuffle law, numeric MZV
//! estimates with rigorous rational tail bounds, and the q-model zeta_q with
//! its stuffle and the exact sum-duality check.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::Rat;
use crate::error::QbracketError;
use crate::qseries::{QSeries, RatPoly};

/// A composition (s_1, ..., s_l) of positive integers; admissible when
/// s_1 >= 2.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct MZIndex {
    s: Vec<u32>,
}

impl MZIndex {
    pub fn new(s: Vec<u32>) -> Result<Self, QbracketError> {
        if s.is_empty() {
            return Err(QbracketError::Domain("empty index".into()));
        }
        if s.contains(&0) {
            return Err(QbracketError::Domain("index entries must be positive".into()));
        }
        Ok(MZIndex { s })
    }

    pub fn parts(&self) -> &[u32] {
        &self.s
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weight(&self) -> u32 {
        self.s.iter().sum()
    }

    pub fn is_admissible(&self) -> bool {
        self.s[0] >= 2
    }
}

impl std::fmt::Display for MZIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.s.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// The dual index, via the block decomposition
/// s = (u_1+1, 1^{t_1-1}, ..., u_k+1, 1^{t_k-1})
/// mapping to (t_k+1, 1^{u_k-1}, ..., t_1+1, 1^{u_1-1}).
pub fn dual(idx: &MZIndex) -> Result<MZIndex, QbracketError> {
    if !idx.is_admissible() {
        return Err(QbracketError::Domain(format!(
            "dual needs an admissible index, got {idx}"
        )));
    }
    // parse blocks: each block is one entry >= 2 followed by a run of 1s
    let mut blocks: Vec<(u32, u32)> = Vec::new(); // (u_i, t_i)
    let mut iter = idx.s.iter().peekable();
    while let Some(&head) = iter.next() {
        debug_assert!(head >= 2, "block heads are >= 2 in an admissible index");
        let mut ones = 0u32;
        while iter.peek() == Some(&&1) {
            iter.next();
            ones += 1;
        }
        blocks.push((head - 1, ones + 1));
    }
    let mut out = Vec::new();
    for &(u, t) in blocks.iter().rev() {
        out.push(t + 1);
        out.extend(std::iter::repeat_n(1, (u - 1) as usize));
    }
    MZIndex::new(out)
}

/// Letter of the two-letter alphabet.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum BinLetter {
    X0,
    X1,
}

/// A word in x_0, x_1. Corresponds to an index iff it ends in x_1 and is
/// admissible iff it also starts with x_0.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct BinWord(pub Vec<BinLetter>);

impl BinWord {
    pub fn unit() -> Self {
        BinWord(vec![])
    }

    /// x_0^{s_1 - 1} x_1 ... x_0^{s_l - 1} x_1.
    pub fn from_index(idx: &MZIndex) -> Self {
        let mut w = Vec::new();
        for &s in idx.parts() {
            for _ in 0..(s - 1) {
                w.push(BinLetter::X0);
            }
            w.push(BinLetter::X1);
        }
        BinWord(w)
    }

    /// Inverse of [`BinWord::from_index`]; fails unless the word ends in x_1.
    pub fn to_index(&self) -> Result<MZIndex, QbracketError> {
        if self.0.last() != Some(&BinLetter::X1) {
            return Err(QbracketError::Domain(format!(
                "word {self} does not end in x1"
            )));
        }
        let mut parts = Vec::new();
        let mut zeros = 0u32;
        for &l in &self.0 {
            match l {
                BinLetter::X0 => zeros += 1,
                BinLetter::X1 => {
                    parts.push(zeros + 1);
                    zeros = 0;
                }
            }
        }
        MZIndex::new(parts)
    }

    pub fn is_admissible(&self) -> bool {
        self.0.first() == Some(&BinLetter::X0) && self.0.last() == Some(&BinLetter::X1)
    }
}

impl std::fmt::Display for BinWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            match l {
                BinLetter::X0 => write!(f, "x0")?,
                BinLetter::X1 => write!(f, "x1")?,
            }
        }
        Ok(())
    }
}

/// The duality anti-automorphism: reverse the word and swap x_0 <-> x_1.
pub fn tau(w: &BinWord) -> BinWord {
    BinWord(
        w.0.iter()
            .rev()
            .map(|l| match l {
                BinLetter::X0 => BinLetter::X1,
                BinLetter::X1 => BinLetter::X0,
            })
            .collect(),
    )
}

/// Rational combination of binary words.
pub type BinLinComb = BTreeMap<BinWord, Rat>;

fn bin_add_term(lc: &mut BinLinComb, w: BinWord, c: Rat) {
    if c.is_zero() {
        return;
    }
    match lc.entry(w) {
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

/// Recursive shuffle product on binary words.
pub fn shuffle_bin(u: &BinWord, v: &BinWord) -> BinLinComb {
    let mut out = BinLinComb::new();
    if u.0.is_empty() {
        bin_add_term(&mut out, v.clone(), Rat::one());
        return out;
    }
    if v.0.is_empty() {
        bin_add_term(&mut out, u.clone(), Rat::one());
        return out;
    }
    let (a, u_tail) = (u.0[0], BinWord(u.0[1..].to_vec()));
    let (b, v_tail) = (v.0[0], BinWord(v.0[1..].to_vec()));
    for (w, c) in shuffle_bin(&u_tail, v) {
        let mut word = vec![a];
        word.extend(w.0);
        bin_add_term(&mut out, BinWord(word), c);
    }
    for (w, c) in shuffle_bin(u, &v_tail) {
        let mut word = vec![b];
        word.extend(w.0);
        bin_add_term(&mut out, BinWord(word), c);
    }
    out
}

/// Rational combination of y-words (compositions).
pub type YLinComb = BTreeMap<Vec<u32>, Rat>;

fn y_add_term(lc: &mut YLinComb, w: Vec<u32>, c: Rat) {
    if c.is_zero() {
        return;
    }
    match lc.entry(w) {
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

/// Classical quasi-shuffle on y-words:
/// y_i v * y_j w = y_i (v * y_j w) + y_j (y_i v * w) + y_{i+j} (v * w).
pub fn stuffle_y(v: &[u32], w: &[u32]) -> YLinComb {
    let mut out = YLinComb::new();
    if v.is_empty() {
        out.insert(w.to_vec(), Rat::one());
        return out;
    }
    if w.is_empty() {
        out.insert(v.to_vec(), Rat::one());
        return out;
    }
    let prepend = |out: &mut YLinComb, head: u32, inner: YLinComb| {
        for (word, c) in inner {
            let mut w2 = vec![head];
            w2.extend(word);
            y_add_term(out, w2, c);
        }
    };
    prepend(&mut out, v[0], stuffle_y(&v[1..], w));
    prepend(&mut out, w[0], stuffle_y(v, &w[1..]));
    prepend(&mut out, v[0] + w[0], stuffle_y(&v[1..], &w[1..]));
    out
}

/// Exact multiple harmonic sum H(s; N) = sum_{N >= n_1 > ... > n_l > 0}
/// prod n_i^{-s_i}, by divide and conquer over the summation range: a node
/// for [a, b] stores H of every contiguous sub-index restricted to that
/// range, and two ranges merge by splitting each chain at the boundary.
pub fn harmonic_sum(s: &[u32], big_n: u64) -> Rat {
    if s.is_empty() {
        return Rat::one();
    }
    if big_n == 0 {
        return Rat::zero();
    }
    let l = s.len();
    // table[i][j] = H(s_i .. s_{j-1}; range), half-open, 0 <= i <= j <= l
    let table = hsum_range(s, 1, big_n);
    table[0][l].clone()
}

fn hsum_range(s: &[u32], a: u64, b: u64) -> Vec<Vec<Rat>> {
    let l = s.len();
    if a == b {
        let mut t = vec![vec![Rat::zero(); l + 1]; l + 1];
        for (i, row) in t.iter_mut().enumerate() {
            row[i] = Rat::one();
        }
        for i in 0..l {
            let mut pw = Rat::one();
            for _ in 0..s[i] {
                pw *= Rat::from_bigint(BigInt::from(a));
            }
            t[i][i + 1] = pw.recip();
        }
        return t;
    }
    let mid = a + (b - a) / 2;
    let (lo, hi) = if b - a >= 1024 {
        rayon::join(|| hsum_range(s, a, mid), || hsum_range(s, mid + 1, b))
    } else {
        (hsum_range(s, a, mid), hsum_range(s, mid + 1, b))
    };
    // larger summation indices sit at the front of the index vector,
    // so the leading sub-index comes from the high range
    let mut t = vec![vec![Rat::zero(); l + 1]; l + 1];
    for (i, row) in t.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate().skip(i) {
            let mut acc = Rat::zero();
            for k in i..=j {
                if hi[i][k].is_zero() || lo[k][j].is_zero() {
                    continue;
                }
                acc += &hi[i][k] * &lo[k][j];
            }
            *cell = acc;
        }
    }
    t
}

/// Apply H(.; N) linearly to a combination of y-words.
pub fn harmonic_sum_lincomb(lc: &YLinComb, big_n: u64) -> Rat {
    let mut acc = Rat::zero();
    for (w, c) in lc {
        acc += c * &harmonic_sum(w, big_n);
    }
    acc
}

/// A rational upper bound on ln N: (number of binary digits) * 6932/10000.
fn ln_upper(n: u64) -> Rat {
    assert!(n >= 1);
    let bits = 64 - n.leading_zeros() as i64;
    Rat::new(6932 * bits, 10_000)
}

/// Rigorous rational bound on the truncation error |zeta(s) - H(s; N)| for
/// an admissible index.
///
/// The error is sum_{n > N} n^{-s_1} H(s_2..s_l; n-1); the inner sum is at
/// most (1 + ln n)^{l-1}, and integral comparison of the decreasing summand
/// gives
///   N^{-(s_1-1)} * sum_{j=0}^{l-1} (l-1)!/(l-1-j)! (1+ln N)^{l-1-j} / (s_1-1)^{j+1},
/// evaluated here with ln N replaced by a rational upper bound. Valid when
/// (l-1) <= s_1 (1 + ln N), which holds for every admissible index once
/// N >= l.
pub fn tail_bound(idx: &MZIndex, big_n: u64) -> Result<Rat, QbracketError> {
    if !idx.is_admissible() {
        return Err(QbracketError::Domain(format!(
            "tail bound needs an admissible index, got {idx}"
        )));
    }
    if big_n < idx.len() as u64 {
        return Err(QbracketError::Domain(format!(
            "tail bound at N = {big_n} needs N >= length {}",
            idx.len()
        )));
    }
    let s1 = idx.parts()[0] as i64;
    let k = (idx.len() - 1) as i64;
    let log_term = Rat::one() + ln_upper(big_n);
    let mut sum = Rat::zero();
    for j in 0..=k {
        // (k)! / (k-j)! = k (k-1) ... (k-j+1)
        let mut falling = Rat::one();
        for t in 0..j {
            falling *= Rat::from(k - t);
        }
        let mut denom_pow = Rat::one();
        for _ in 0..=j {
            denom_pow *= Rat::from(s1 - 1);
        }
        sum += falling * log_term.pow((k - j) as u32) / denom_pow;
    }
    let mut n_pow = Rat::one();
    for _ in 0..(s1 - 1) {
        n_pow *= Rat::from_bigint(BigInt::from(big_n));
    }
    Ok(sum / n_pow)
}

/// H(s; N) together with the rigorous tail bound at M = N. Two MZV
/// expressions are accepted as numerically equal iff the difference of their
/// estimates is at most the sum of their tail bounds.
pub fn mzv_estimate(idx: &MZIndex, big_n: u64) -> Result<(Rat, Rat), QbracketError> {
    let bound = tail_bound(idx, big_n)?;
    let value = harmonic_sum(idx.parts(), big_n);
    Ok((value, bound))
}

/// q-multiple zeta value: sum over n_1 > ... > n_l > 0 of
/// prod q^{n_i (s_i - 1)} / [n_i]^{s_i} with [n] = (1 - q^n)/(1 - q),
/// truncated at `precision`. Each factor expands as
/// q^{n(s-1)} (1-q)^s (1-q^n)^{-s}.
pub fn zeta_q(idx: &MZIndex, precision: usize) -> Result<QSeries, QbracketError> {
    if !idx.is_admissible() {
        return Err(QbracketError::Domain(format!(
            "zeta_q needs an admissible index, got {idx}"
        )));
    }
    Ok(zeta_q_unchecked(idx.parts(), precision))
}

fn zeta_q_unchecked(parts: &[u32], precision: usize) -> QSeries {
    let l = parts.len();
    let factor = |s: u32, n: usize| -> QSeries {
        let shift = n * (s as usize - 1);
        if shift > precision {
            return QSeries::zero(precision);
        }
        let inv = QSeries::geometric_inv_pow(n, s, precision);
        let poly = QSeries::one_minus_qn_pow(1, s, precision);
        (&inv * &poly).shift(shift)
    };
    let mut prev: Vec<QSeries> = (0..=precision + 1)
        .map(|_| QSeries::one(precision))
        .collect();
    for i in (0..l).rev() {
        let mut cur = Vec::with_capacity(precision + 2);
        cur.push(QSeries::zero(precision));
        for n in 1..=precision {
            let term = &factor(parts[i], n) * &prev[n - 1];
            cur.push(&cur[n - 1] + &term);
        }
        cur.push(cur[precision].clone());
        prev = cur;
    }
    prev[precision].clone()
}

/// S_q(s; c): the sum of zeta_q over all ways of adding a composition of c
/// to the index.
pub fn s_q(idx: &MZIndex, c: u32, precision: usize) -> Result<QSeries, QbracketError> {
    if !idx.is_admissible() {
        return Err(QbracketError::Domain(format!(
            "s_q needs an admissible index, got {idx}"
        )));
    }
    let mut acc = QSeries::zero(precision);
    let mut shifted = idx.parts().to_vec();
    fn rec(
        i: usize,
        rem: u32,
        shifted: &mut Vec<u32>,
        base: &[u32],
        precision: usize,
        acc: &mut QSeries,
    ) {
        if i + 1 == shifted.len() {
            shifted[i] = base[i] + rem;
            *acc = &*acc + &zeta_q_unchecked(shifted, precision);
            return;
        }
        for e in 0..=rem {
            shifted[i] = base[i] + e;
            rec(i + 1, rem - e, shifted, base, precision, acc);
        }
    }
    let base = idx.parts().to_vec();
    rec(0, c, &mut shifted, &base, precision, &mut acc);
    Ok(acc)
}

/// Exact check of the q-lift of Ohno's relations: S_q(s; c) = S_q(s†; c).
pub fn ohno_q_check(idx: &MZIndex, c: u32, precision: usize) -> Result<bool, QbracketError> {
    let d = dual(idx)?;
    Ok(s_q(idx, c, precision)? == s_q(&d, c, precision)?)
}

/// y-words with coefficients that are polynomials in q; the carrier of the
/// q-stuffle, whose merge term is y_{s+t} + (1-q) y_{s+t-1}.
pub type QYLinComb = BTreeMap<Vec<u32>, RatPoly>;

fn qy_add_term(lc: &mut QYLinComb, w: Vec<u32>, p: RatPoly) {
    if p.is_zero() {
        return;
    }
    match lc.entry(w) {
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let sum = e.get().add(&p);
            if sum.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(p);
        }
    }
}

/// The q-stuffle product
/// y_s v *_q y_t w = y_s (v *_q y_t w) + y_t (y_s v *_q w)
///                   + (y_{s+t} + (1-q) y_{s+t-1}) (v *_q w).
pub fn q_stuffle(v: &[u32], w: &[u32]) -> QYLinComb {
    let mut out = QYLinComb::new();
    if v.is_empty() {
        out.insert(w.to_vec(), RatPoly::constant(Rat::one()));
        return out;
    }
    if w.is_empty() {
        out.insert(v.to_vec(), RatPoly::constant(Rat::one()));
        return out;
    }
    let prepend = |out: &mut QYLinComb, head: u32, inner: &QYLinComb, scale: &RatPoly| {
        for (word, p) in inner {
            let mut w2 = vec![head];
            w2.extend(word.iter().copied());
            qy_add_term(out, w2, p.mul(scale));
        }
    };
    let one = RatPoly::constant(Rat::one());
    let one_minus_q = RatPoly::from_coeffs(vec![Rat::one(), -Rat::one()]);
    prepend(&mut out, v[0], &q_stuffle(&v[1..], w), &one);
    prepend(&mut out, w[0], &q_stuffle(v, &w[1..]), &one);
    let rest = q_stuffle(&v[1..], &w[1..]);
    prepend(&mut out, v[0] + w[0], &rest, &one);
    prepend(&mut out, v[0] + w[0] - 1, &rest, &one_minus_q);
    out
}

/// Exact series check that the q-stuffle is a homomorphism for zeta_q:
/// evaluates the product word by word (coefficient polynomials multiplied
/// in) and compares with zeta_q(v) * zeta_q(w).
pub fn verify_q_stuffle(v: &MZIndex, w: &MZIndex, precision: usize) -> Result<bool, QbracketError> {
    if !v.is_admissible() || !w.is_admissible() {
        return Err(QbracketError::Domain(
            "q-stuffle verification needs admissible words".into(),
        ));
    }
    let lhs = &zeta_q(v, precision)? * &zeta_q(w, precision)?;
    let mut rhs = QSeries::zero(precision);
    for (word, poly) in q_stuffle(v.parts(), w.parts()) {
        debug_assert!(word[0] >= 2, "q-stuffle of admissible words stays admissible");
        let base = zeta_q_unchecked(&word, precision);
        rhs = &rhs + &(&base * &poly.eval_q_power(1, precision));
    }
    Ok(lhs == rhs)
}

/// x_1 sh w - x_1 * w as a combination of y-words. Every surviving word
/// must be admissible; a non-admissible survivor means the two products
/// failed to cancel and is reported as an error.
pub fn hoffman_difference(w: &BinWord) -> Result<YLinComb, QbracketError> {
    if !w.is_admissible() {
        return Err(QbracketError::Domain(format!(
            "hoffman difference needs an admissible word, got {w}"
        )));
    }
    let x1 = BinWord(vec![BinLetter::X1]);
    let mut diff = YLinComb::new();
    for (bw, c) in shuffle_bin(&x1, w) {
        let idx = bw.to_index()?;
        y_add_term(&mut diff, idx.parts().to_vec(), c);
    }
    let w_idx = w.to_index()?;
    for (yw, c) in stuffle_y(&[1], w_idx.parts()) {
        y_add_term(&mut diff, yw, -c);
    }
    for word in diff.keys() {
        if word[0] < 2 {
            return Err(QbracketError::Domain(format!(
                "non-admissible word ({}) survives the difference",
                word.iter()
                    .map(u32::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            )));
        }
    }
    Ok(diff)
}

/// Numeric check that the Hoffman combination vanishes: the estimate of the
/// difference must lie within the summed tail bounds.
pub fn hoffman_check(w: &BinWord, big_n: u64) -> Result<bool, QbracketError> {
    let diff = hoffman_difference(w)?;
    let mut value = Rat::zero();
    let mut budget = Rat::zero();
    for (word, c) in &diff {
        let idx = MZIndex::new(word.clone())?;
        let (v, b) = mzv_estimate(&idx, big_n)?;
        value += c * &v;
        budget += c.abs() * b;
    }
    Ok(value.abs() <= budget)
}
