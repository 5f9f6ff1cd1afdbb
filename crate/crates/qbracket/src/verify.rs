//! Verification suites: each runs one family of exact identity checks and
//! reports pass/fail counts. The `verify` subcommand and the acceptance
//! tests are both thin wrappers around these functions.

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;

use crate::arith::Rat;
use crate::bialgebra::{
    partition, partition_lincomb, shuffle, stuffle, words_of_weight_up_to, BiWord, LinComb,
};
use crate::brackets::{BiIndex, BracketCache};
use crate::linsys::{binomial_lemma_check, generating_identity_check, verify_inverse};
use crate::qmzv::{
    harmonic_sum, mzv_estimate, ohno_q_check, stuffle_y, MZIndex,
};

/// Outcome of one verification suite.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl std::fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.passed() {
            write!(f, "{}: PASS ({} checks)", self.suite, self.checks)
        } else {
            writeln!(
                f,
                "{}: FAIL ({} of {} checks failed)",
                self.suite,
                self.failures.len(),
                self.checks
            )?;
            for failure in &self.failures {
                writeln!(f, "  {failure}")?;
            }
            Ok(())
        }
    }
}

/// Both products are homomorphisms onto series: evaluate(v * w) and
/// evaluate(v sh w) equal evaluate(v) evaluate(w) for all nonempty word
/// pairs of lengths <= 2 and combined weight <= `max_weight`, exactly at
/// `precision`.
pub fn homomorphism_suite(max_weight: u32, precision: usize) -> SuiteReport {
    let cache = BracketCache::new();
    let words: Vec<BiWord> = words_of_weight_up_to(max_weight - 1, 2)
        .into_iter()
        .filter(|w| !w.is_empty())
        .collect();
    let mut pairs = Vec::new();
    for (i, v) in words.iter().enumerate() {
        for w in &words[i..] {
            if v.weight() + w.weight() <= max_weight {
                pairs.push((v.clone(), w.clone()));
            }
        }
    }
    let failures: Vec<String> = pairs
        .par_iter()
        .flat_map(|(v, w)| {
            let mut local = Vec::new();
            let lv = LinComb::from_word(v.clone());
            let lw = LinComb::from_word(w.clone());
            let product = &cache.bi_bracket(&BiIndex::from_word(v).unwrap(), precision)
                * &cache.bi_bracket(&BiIndex::from_word(w).unwrap(), precision);
            if cache.evaluate(&stuffle(&lv, &lw), precision) != product {
                local.push(format!("stuffle homomorphism fails at {v} * {w}"));
            }
            if cache.evaluate(&shuffle(&lv, &lw), precision) != product {
                local.push(format!("shuffle homomorphism fails at {v} sh {w}"));
            }
            local
        })
        .collect();
    SuiteReport {
        suite: "homomorphism".into(),
        checks: pairs.len() * 2,
        failures,
    }
}

/// Partition involution and series invariance over all words of length <= 3
/// and total weight <= `max_weight`, plus the closed-form checks in the
/// length-1 and length-2 cases.
pub fn partition_suite(max_weight: u32, precision: usize) -> SuiteReport {
    let cache = BracketCache::new();
    let words: Vec<BiWord> = words_of_weight_up_to(max_weight, 3)
        .into_iter()
        .filter(|w| !w.is_empty())
        .collect();
    let failures = Mutex::new(Vec::new());
    words.par_iter().for_each(|w| {
        let p = partition(w).unwrap();
        let mut local = Vec::new();
        if partition_lincomb(&p) != LinComb::from_word(w.clone()) {
            local.push(format!("partition involution fails at {w}"));
        }
        let lhs = cache.bi_bracket(&BiIndex::from_word(w).unwrap(), precision);
        if lhs != cache.evaluate(&p, precision) {
            local.push(format!("partition series invariance fails at {w}"));
        }
        if w.len() == 1 {
            let letter = w.letters()[0];
            let expect = LinComb::from_word(BiWord::letter(letter.r + 1, letter.s - 1));
            if p != expect {
                local.push(format!("length-1 closed form fails at {w}"));
            }
        }
        if w.len() == 2 && partition_l2_closed_form(w) != p {
            local.push(format!("length-2 closed form fails at {w}"));
        }
        if !local.is_empty() {
            failures.lock().unwrap().append(&mut local);
        }
    });
    let checks = words.len() * 2 + words.iter().filter(|w| w.len() <= 2).count();
    SuiteReport {
        suite: "partition".into(),
        checks,
        failures: failures.into_inner().unwrap(),
    }
}

fn partition_l2_closed_form(w: &BiWord) -> LinComb {
    use crate::arith::binomial;
    use crate::bialgebra::Letter;
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

/// The closed-form inverse of the reduced system: true at every odd S + R in
/// 2 <= S <= s_max, 0 <= R <= r_max, and false at (3, 1).
pub fn inverse_suite(s_max: u32, r_max: u32) -> SuiteReport {
    let mut cells = Vec::new();
    for s in 2..=s_max {
        for r in 0..=r_max {
            if (s + r) % 2 == 1 {
                cells.push((s, r));
            }
        }
    }
    let mut failures: Vec<String> = cells
        .par_iter()
        .filter(|&&(s, r)| !verify_inverse(s, r))
        .map(|(s, r)| format!("inverse formula fails at ({s},{r})"))
        .collect();
    let checks = cells.len() + 1;
    if verify_inverse(3, 1) {
        failures.push("inverse formula unexpectedly holds at (3,1)".into());
    }
    SuiteReport {
        suite: "inverse".into(),
        checks,
        failures,
    }
}

/// The four binomial-sum identities for all n <= n_max.
pub fn binomial_lemma_suite(n_max: u32) -> SuiteReport {
    let ok = binomial_lemma_check(n_max);
    SuiteReport {
        suite: "binomial-lemma".into(),
        checks: (n_max as usize) * 4,
        failures: if ok {
            vec![]
        } else {
            vec![format!("a binomial identity fails below n = {n_max}")]
        },
    }
}

fn admissible_indices_up_to(max_weight: u32) -> Vec<MZIndex> {
    let mut out = Vec::new();
    fn rec(rem: u32, cur: &mut Vec<u32>, out: &mut Vec<MZIndex>) {
        if !cur.is_empty() {
            out.push(MZIndex::new(cur.clone()).unwrap());
        }
        if rem == 0 {
            return;
        }
        let lo = if cur.is_empty() { 2 } else { 1 };
        for v in lo..=rem {
            cur.push(v);
            rec(rem - v, cur, out);
            cur.pop();
        }
    }
    rec(max_weight, &mut Vec::new(), &mut out);
    out
}

/// Exact q-duality and Ohno lift: S_q(s; c) = S_q(s†; c) for every
/// admissible index of weight <= `max_weight` and 0 <= c <= `c_max`.
pub fn ohno_q_suite(max_weight: u32, c_max: u32, precision: usize) -> SuiteReport {
    let indices = admissible_indices_up_to(max_weight);
    let mut cases = Vec::new();
    for idx in &indices {
        for c in 0..=c_max {
            cases.push((idx.clone(), c));
        }
    }
    let failures: Vec<String> = cases
        .par_iter()
        .filter_map(|(idx, c)| match ohno_q_check(idx, *c, precision) {
            Ok(true) => None,
            Ok(false) => Some(format!("S_q duality fails at {idx}, c = {c}")),
            Err(e) => Some(format!("S_q duality errored at {idx}, c = {c}: {e}")),
        })
        .collect();
    SuiteReport {
        suite: "ohno-q".into(),
        checks: cases.len(),
        failures,
    }
}

fn compositions_up_to(max_weight: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    fn rec(rem: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if rem == 0 {
            return;
        }
        for v in 1..=rem {
            cur.push(v);
            rec(rem - v, cur, out);
            cur.pop();
        }
    }
    rec(max_weight, &mut Vec::new(), &mut out);
    out
}

/// Incremental H(s; n) tables for 0 <= n <= big_n, shared across checks.
struct HarmonicTables {
    max_n: usize,
    map: Mutex<HashMap<Vec<u32>, Vec<Rat>>>,
}

impl HarmonicTables {
    fn new(max_n: usize) -> Self {
        HarmonicTables {
            max_n,
            map: Mutex::new(HashMap::new()),
        }
    }

    fn table(&self, word: &[u32]) -> Vec<Rat> {
        if word.is_empty() {
            return vec![Rat::one(); self.max_n + 1];
        }
        if let Some(hit) = self.map.lock().unwrap().get(word) {
            return hit.clone();
        }
        let tail = self.table(&word[1..]);
        let mut out = Vec::with_capacity(self.max_n + 1);
        out.push(Rat::zero());
        for n in 1..=self.max_n {
            let mut pw = Rat::one();
            for _ in 0..word[0] {
                pw *= Rat::from(n as i64);
            }
            let term = pw.recip() * tail[n - 1].clone();
            out.push(out[n - 1].clone() + term);
        }
        self.map
            .lock()
            .unwrap()
            .insert(word.to_vec(), out.clone());
        out
    }
}

/// The finite stuffle law of multiple harmonic sums:
/// H(v; N) H(w; N) = H(v * w; N) exactly, for all N <= n_max and all pairs
/// of y-words of weight <= `max_weight`.
pub fn mhs_suite(max_weight: u32, n_max: usize) -> SuiteReport {
    let words = compositions_up_to(max_weight);
    let tables = HarmonicTables::new(n_max);
    let mut pairs = Vec::new();
    for (i, v) in words.iter().enumerate() {
        for w in &words[i..] {
            pairs.push((v.clone(), w.clone()));
        }
    }
    let failures: Vec<String> = pairs
        .par_iter()
        .flat_map(|(v, w)| {
            let tv = tables.table(v);
            let tw = tables.table(w);
            let product: Vec<(Vec<Rat>, Rat)> = stuffle_y(v, w)
                .into_iter()
                .map(|(word, c)| (tables.table(&word), c))
                .collect();
            let mut local = Vec::new();
            for n in 0..=n_max {
                let lhs = tv[n].clone() * tw[n].clone();
                let mut rhs = Rat::zero();
                for (t, c) in &product {
                    rhs += c * &t[n];
                }
                if lhs != rhs {
                    local.push(format!("MHS stuffle fails at ({v:?}, {w:?}; N = {n})"));
                    break;
                }
            }
            local
        })
        .collect();
    SuiteReport {
        suite: "mhs".into(),
        checks: pairs.len() * (n_max + 1),
        failures,
    }
}

/// Numeric MZV checks at summation cutoff `big_n`: known identities must
/// agree within the summed rigorous tail bounds. Covers the pairwise checks,
/// the sum theorem at (S, l) in {(4,2), (5,2), (5,3)}, and the weight-4
/// collapse.
pub fn numeric_mzv_suite(big_n: u64) -> SuiteReport {
    let idx = |parts: &[u32]| MZIndex::new(parts.to_vec()).unwrap();

    let mut cases: Vec<(String, Vec<(MZIndex, Rat)>)> = vec![
        (
            "zeta(2,1) = zeta(3)".into(),
            vec![(idx(&[2, 1]), Rat::one()), (idx(&[3]), -Rat::one())],
        ),
        (
            "zeta(3,1) = zeta(4)/4".into(),
            vec![(idx(&[3, 1]), Rat::one()), (idx(&[4]), Rat::new(-1, 4))],
        ),
        (
            "zeta(2,2) = 3 zeta(4)/4".into(),
            vec![(idx(&[2, 2]), Rat::one()), (idx(&[4]), Rat::new(-3, 4))],
        ),
        (
            "zeta(4) = 4 zeta(3,1)".into(),
            vec![(idx(&[4]), Rat::one()), (idx(&[3, 1]), Rat::from(-4i64))],
        ),
        (
            "zeta(4) = 4/3 zeta(2,2)".into(),
            vec![(idx(&[4]), Rat::one()), (idx(&[2, 2]), Rat::new(-4, 3))],
        ),
        (
            "zeta(4) = zeta(2,1,1)".into(),
            vec![(idx(&[4]), Rat::one()), (idx(&[2, 1, 1]), -Rat::one())],
        ),
    ];
    // sum theorem: the admissible indices of weight S and length l sum to
    // zeta(S)
    for (total, len) in [(4u32, 2usize), (5, 2), (5, 3)] {
        let mut terms: Vec<(MZIndex, Rat)> = admissible_indices_up_to(total)
            .into_iter()
            .filter(|i| i.weight() == total && i.len() == len)
            .map(|i| (i, Rat::one()))
            .collect();
        terms.push((idx(&[total]), -Rat::one()));
        cases.push((
            format!("sum theorem at weight {total}, length {len}"),
            terms,
        ));
    }

    // estimate each distinct index once, in parallel
    let mut distinct: Vec<MZIndex> = Vec::new();
    for (_, terms) in &cases {
        for (i, _) in terms {
            if !distinct.contains(i) {
                distinct.push(i.clone());
            }
        }
    }
    let estimates: HashMap<MZIndex, Result<(Rat, Rat), String>> = distinct
        .par_iter()
        .map(|i| {
            (
                i.clone(),
                mzv_estimate(i, big_n).map_err(|e| e.to_string()),
            )
        })
        .collect();

    let mut failures = Vec::new();
    let mut checks = 0usize;
    for (label, terms) in &cases {
        checks += 1;
        let mut value = Rat::zero();
        let mut budget = Rat::zero();
        let mut broken = false;
        for (i, c) in terms {
            match &estimates[i] {
                Ok((v, b)) => {
                    value += c * v;
                    budget += c.abs() * b.clone();
                }
                Err(e) => {
                    failures.push(format!("{label}: estimate failed: {e}"));
                    broken = true;
                    break;
                }
            }
        }
        if !broken && value.abs() > budget {
            failures.push(format!(
                "{label}: |difference| = {} exceeds tail budget {}",
                value.abs().to_decimal(12),
                budget.to_decimal(12)
            ));
        }
    }

    // cheap f64 cross-check of the exact arithmetic on one value
    checks += 1;
    let h = harmonic_sum(&[2], big_n.min(2000));
    let mut approx = 0f64;
    for n in 1..=big_n.min(2000) {
        approx += 1.0 / (n as f64 * n as f64);
    }
    if (h.to_f64() - approx).abs() > 1e-9 {
        failures.push("exact H(2;N) drifts from float summation".into());
    }

    SuiteReport {
        suite: "numeric-mzv".into(),
        checks,
        failures,
    }
}

/// The generating-function form of the odd-weight identity at sample odd
/// (S, R) cells, plus the parity precondition built into the check.
pub fn generating_identity_suite(precision: usize) -> SuiteReport {
    let cells = [(3u32, 0u32), (3, 2), (2, 1), (4, 1), (5, 0)];
    let failures: Vec<String> = cells
        .par_iter()
        .filter_map(|&(s, r)| match generating_identity_check(s, r, precision) {
            Ok(true) => None,
            Ok(false) => Some(format!("generating identity fails at ({s},{r})")),
            Err(e) => Some(format!("generating identity errored at ({s},{r}): {e}")),
        })
        .collect();
    SuiteReport {
        suite: "generating-identity".into(),
        checks: cells.len(),
        failures,
    }
}

/// Run a suite by name with default parameters; `None` for an unknown name.
pub fn run_suite(name: &str) -> Option<SuiteReport> {
    match name {
        "homomorphism" => Some(homomorphism_suite(6, 30)),
        "partition" => Some(partition_suite(7, 30)),
        "inverse" => Some(inverse_suite(9, 8)),
        "binomial-lemma" => Some(binomial_lemma_suite(12)),
        "ohno-q" => Some(ohno_q_suite(5, 3, 40)),
        "mhs" => Some(mhs_suite(5, 30)),
        "numeric-mzv" => Some(numeric_mzv_suite(10_000)),
        "generating-identity" => Some(generating_identity_suite(40)),
        _ => None,
    }
}

/// The names accepted by [`run_suite`], in canonical order.
pub const SUITE_NAMES: [&str; 8] = [
    "homomorphism",
    "partition",
    "inverse",
    "binomial-lemma",
    "ohno-q",
    "mhs",
    "numeric-mzv",
    "generating-identity",
];
