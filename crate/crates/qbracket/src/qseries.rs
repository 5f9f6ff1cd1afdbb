//! Truncated formal power series in q over [`Rat`], plus the polynomial
//! helpers used to evaluate bracket factors.
//!
//! Every binary operation truncates to the smaller precision of its
//! operands. Equality across precisions is never silent: [`QSeries::compare`]
//! reports a precision mismatch distinctly from a coefficient mismatch.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::de::Error as _;
use serde::{Deserialize, Serialize};

use crate::arith::{binomial, factorial, Rat};
use crate::error::QbracketError;

/// A formal power series in q truncated at degree `precision`, stored densely
/// as the coefficients of q^0 .. q^precision.
#[derive(Clone, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<Rat>,
}

#[derive(Serialize, Deserialize)]
struct QSeriesRepr {
    precision: usize,
    coeffs: Vec<Rat>,
}

impl Serialize for QSeries {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        QSeriesRepr {
            precision: self.precision(),
            coeffs: self.coeffs.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for QSeries {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = QSeriesRepr::deserialize(de)?;
        if repr.coeffs.len() != repr.precision + 1 {
            return Err(D::Error::custom(format!(
                "expected {} coefficients for precision {}, got {}",
                repr.precision + 1,
                repr.precision,
                repr.coeffs.len()
            )));
        }
        Ok(QSeries { coeffs: repr.coeffs })
    }
}

/// Outcome of comparing two series which may differ in precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeriesCmp {
    /// Same precision, identical coefficients.
    Equal,
    /// Coefficients agree on the shared prefix but precisions differ.
    PrefixEqual { shared_precision: usize },
    /// First index at which the coefficients differ.
    Differs { index: usize },
}

impl QSeries {
    /// The zero series of the given precision.
    pub fn zero(precision: usize) -> Self {
        QSeries {
            coeffs: vec![Rat::zero(); precision + 1],
        }
    }

    /// The constant series 1.
    pub fn one(precision: usize) -> Self {
        let mut s = Self::zero(precision);
        s.coeffs[0] = Rat::one();
        s
    }

    /// c * q^k, truncated.
    pub fn monomial(c: Rat, k: usize, precision: usize) -> Self {
        let mut s = Self::zero(precision);
        if k <= precision {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least the constant term");
        QSeries { coeffs }
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of q^k; zero beyond the truncation order.
    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rat::is_zero)
    }

    /// Restrict to a lower precision (no-op if already at most `precision`).
    pub fn truncate(&self, precision: usize) -> Self {
        if precision >= self.precision() {
            self.clone()
        } else {
            QSeries {
                coeffs: self.coeffs[..=precision].to_vec(),
            }
        }
    }

    pub fn compare(&self, other: &QSeries) -> SeriesCmp {
        let shared = self.precision().min(other.precision());
        for k in 0..=shared {
            if self.coeffs[k] != other.coeffs[k] {
                return SeriesCmp::Differs { index: k };
            }
        }
        if self.precision() == other.precision() {
            SeriesCmp::Equal
        } else {
            SeriesCmp::PrefixEqual {
                shared_precision: shared,
            }
        }
    }

    /// True if the coefficients agree on the shared prefix.
    pub fn agrees_with(&self, other: &QSeries) -> bool {
        !matches!(self.compare(other), SeriesCmp::Differs { .. })
    }

    pub fn scale(&self, c: &Rat) -> Self {
        QSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiply by q^k, truncating at the original precision.
    pub fn shift(&self, k: usize) -> Self {
        let mut out = Self::zero(self.precision());
        for (i, c) in self.coeffs.iter().enumerate() {
            if i + k > self.precision() {
                break;
            }
            out.coeffs[i + k] = c.clone();
        }
        out
    }

    /// The derivation q d/dq: coefficient n maps to n * a_n.
    pub fn q_d_dq(&self) -> Self {
        QSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, a)| Rat::from(n as i64) * a.clone())
                .collect(),
        }
    }

    /// (1 - q^n)^{-s} truncated: the geometric expansion
    /// sum_{k >= 0} C(s+k-1, k) q^{nk}.
    pub fn geometric_inv_pow(n: usize, s: u32, precision: usize) -> Self {
        assert!(n >= 1);
        let mut out = Self::zero(precision);
        let mut k = 0usize;
        while n * k <= precision {
            out.coeffs[n * k] = binomial((s as i64) + (k as i64) - 1, k as i64);
            k += 1;
        }
        out
    }

    /// (1 - q^n)^s as a polynomial, truncated.
    pub fn one_minus_qn_pow(n: usize, s: u32, precision: usize) -> Self {
        let mut out = Self::zero(precision);
        for k in 0..=(s as usize) {
            let e = n * k;
            if e > precision {
                break;
            }
            let sign = if k % 2 == 0 { Rat::one() } else { -Rat::one() };
            out.coeffs[e] = sign * binomial(s as i64, k as i64);
        }
        out
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn recip(&self) -> Result<Self, QbracketError> {
        if self.coeffs[0].is_zero() {
            return Err(QbracketError::Domain(
                "series inverse needs a unit constant term".into(),
            ));
        }
        let n = self.precision();
        let c0 = self.coeffs[0].recip();
        let mut inv = Self::zero(n);
        inv.coeffs[0] = c0.clone();
        for k in 1..=n {
            let mut acc = Rat::zero();
            for j in 1..=k {
                acc += self.coeffs[j].clone() * inv.coeffs[k - j].clone();
            }
            inv.coeffs[k] = -(acc * c0.clone());
        }
        Ok(inv)
    }

    /// Exact division by a series with nonzero constant term.
    pub fn div_unit(&self, rhs: &QSeries) -> Result<Self, QbracketError> {
        Ok(self * &rhs.recip()?)
    }
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        let n = self.precision().min(rhs.precision());
        QSeries {
            coeffs: (0..=n)
                .map(|k| self.coeffs[k].clone() + rhs.coeffs[k].clone())
                .collect(),
        }
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        let n = self.precision().min(rhs.precision());
        QSeries {
            coeffs: (0..=n)
                .map(|k| self.coeffs[k].clone() - rhs.coeffs[k].clone())
                .collect(),
        }
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        let n = self.precision().min(rhs.precision());
        let mut out = QSeries::zero(n);
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n + 1 - i) {
                if b.is_zero() {
                    continue;
                }
                out.coeffs[i + j] += a * b;
            }
        }
        out
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 if c.is_one() => write!(f, "q")?,
                1 => write!(f, "{c}*q")?,
                _ if c.is_one() => write!(f, "q^{k}")?,
                _ => write!(f, "{c}*q^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.precision() + 1)
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Polynomial over [`Rat`] in one variable, ascending powers, trailing zeros
/// trimmed. Used for the numerator polynomials P_s(x) and for polynomial
/// coefficients of the q-stuffle.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct RatPoly {
    coeffs: Vec<Rat>,
}

impl RatPoly {
    pub fn zero() -> Self {
        RatPoly { coeffs: vec![] }
    }

    pub fn constant(c: Rat) -> Self {
        RatPoly { coeffs: vec![c] }.trimmed()
    }

    /// The monomial x.
    pub fn x() -> Self {
        RatPoly {
            coeffs: vec![Rat::zero(), Rat::one()],
        }
    }

    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        RatPoly { coeffs }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last().is_some_and(Rat::is_zero) {
            self.coeffs.pop();
        }
        self
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn add(&self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        RatPoly { coeffs }.trimmed()
    }

    pub fn mul(&self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        RatPoly { coeffs }.trimmed()
    }

    pub fn scale(&self, c: &Rat) -> RatPoly {
        RatPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
        .trimmed()
    }

    pub fn derivative(&self) -> RatPoly {
        if self.coeffs.len() <= 1 {
            return RatPoly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, a)| Rat::from(k as i64) * a.clone())
            .collect();
        RatPoly { coeffs }.trimmed()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    /// Substitute x = q^n and truncate to a series.
    pub fn eval_q_power(&self, n: usize, precision: usize) -> QSeries {
        let mut out = QSeries::zero(precision);
        for (k, c) in self.coeffs.iter().enumerate() {
            let e = k * n;
            if e > precision {
                break;
            }
            out.coeffs[e] += c.clone();
        }
        out
    }

    /// Substitute a series for x, truncating at the series precision.
    pub fn eval_series(&self, x: &QSeries) -> QSeries {
        let n = x.precision();
        let mut acc = QSeries::zero(n);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + &QSeries::monomial(c.clone(), 0, n);
        }
        acc
    }
}

/// Numerator polynomial P_s of sum_{d>0} d^{s-1} x^d = P_s(x) / (1-x)^s,
/// normalized so P_1(x) = x, via the recurrence
/// P_{s+1}(x) = P'_s(x)(1-x)x + s P_s(x) x.
pub fn eulerian_poly(s: u32) -> RatPoly {
    assert!(s >= 1, "eulerian_poly needs s >= 1");
    let one_minus_x = RatPoly::from_coeffs(vec![Rat::one(), -Rat::one()]);
    let x = RatPoly::x();
    let mut p = RatPoly::x();
    for k in 1..s {
        let dp = p.derivative();
        p = dp.mul(&one_minus_x).mul(&x).add(&p.scale(&Rat::from(k)).mul(&x));
    }
    p
}

/// One factor of a bi-bracket evaluation:
/// (n^r / r!) * P_s(q^n) / ((s-1)! (1-q^n)^s), truncated at `precision`.
/// The lowest nonzero power is q^n.
pub fn bracket_factor(n: usize, s: u32, r: u32, precision: usize) -> QSeries {
    assert!(n >= 1, "bracket_factor needs n >= 1");
    let numer = eulerian_poly(s).eval_q_power(n, precision);
    let inv = QSeries::geometric_inv_pow(n, s, precision);
    let scalar = Rat::from_bigint(num_bigint::BigInt::from(n)).pow(r)
        / Rat::from_bigint(factorial(r) * factorial(s - 1));
    (&numer * &inv).scale(&scalar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ser(coeffs: &[i64]) -> QSeries {
        QSeries::from_coeffs(coeffs.iter().map(|&c| Rat::from(c)).collect())
    }

    #[test]
    fn add_and_mul_basics() {
        let q = QSeries::monomial(Rat::one(), 1, 5);
        let q2 = QSeries::monomial(Rat::one(), 2, 5);
        assert_eq!(&q + &q2, ser(&[0, 1, 1, 0, 0, 0]));
        assert_eq!(&q * &q, ser(&[0, 0, 1, 0, 0, 0]));
        let a = ser(&[3, -1, 2]);
        assert_eq!(&a + &QSeries::zero(2), a);
        assert_eq!(&QSeries::one(2) * &a, a);
    }

    #[test]
    fn truncation_to_min_precision() {
        let a = ser(&[1, 1, 1, 1, 1]);
        let b = ser(&[1, 2]);
        assert_eq!((&a + &b).precision(), 1);
        assert_eq!((&a * &b).precision(), 1);
        assert_eq!(
            a.compare(&a.truncate(1)),
            SeriesCmp::PrefixEqual { shared_precision: 1 }
        );
        assert_eq!(b.compare(&ser(&[1, 3])), SeriesCmp::Differs { index: 1 });
        assert_eq!(b.compare(&b.clone()), SeriesCmp::Equal);
    }

    #[test]
    fn q_d_dq_basics() {
        assert_eq!(QSeries::one(4).q_d_dq(), QSeries::zero(4));
        let q3 = QSeries::monomial(Rat::one(), 3, 4);
        assert_eq!(q3.q_d_dq(), QSeries::monomial(Rat::from(3), 3, 4));
    }

    #[test]
    fn eulerian_small_cases() {
        // Oracle for s=1: sum_{d>0} x^d * (1-x) = x exactly.
        assert_eq!(eulerian_poly(1), RatPoly::x());
        // s=3 by applying x d/dx twice to x/(1-x) and clearing (1-x)^3:
        // sum d^2 x^d = (x + x^2)/(1-x)^3.
        assert_eq!(
            eulerian_poly(3),
            RatPoly::from_coeffs(vec![Rat::zero(), Rat::one(), Rat::one()])
        );
        assert_eq!(
            eulerian_poly(4),
            RatPoly::from_coeffs(vec![
                Rat::zero(),
                Rat::one(),
                Rat::from(4),
                Rat::one()
            ])
        );
    }

    #[test]
    fn eulerian_at_one_is_factorial() {
        for s in 1..=8u32 {
            assert_eq!(
                eulerian_poly(s).eval(&Rat::one()),
                Rat::from_bigint(factorial(s - 1)),
                "P_{s}(1)"
            );
        }
    }

    /// Direct-summation oracle: sum_{d>0} d^{s-1} q^{nd} with u-weight n^r/r!.
    fn factor_oracle(n: usize, s: u32, r: u32, precision: usize) -> QSeries {
        let mut out = QSeries::zero(precision);
        let mut d = 1usize;
        while n * d <= precision {
            let term = Rat::from_bigint(num_bigint::BigInt::from(d)).pow(s - 1)
                * Rat::from_bigint(num_bigint::BigInt::from(n)).pow(r)
                / Rat::from_bigint(factorial(r) * factorial(s - 1));
            out.coeffs[n * d] += term;
            d += 1;
        }
        out
    }

    #[test]
    fn bracket_factor_examples() {
        // geometric series
        let g = bracket_factor(1, 1, 0, 6);
        assert_eq!(g, ser(&[0, 1, 1, 1, 1, 1, 1]));
        // (n=2, s=2, r=0, N=6): q^2 + 2q^4 + 3q^6
        assert_eq!(bracket_factor(2, 2, 0, 6), ser(&[0, 0, 1, 0, 2, 0, 3]));
        // (n=1, s=1, r=2, N=3): (1/2)(q + q^2 + q^3)
        let half = Rat::new(1, 2);
        let expect = QSeries::from_coeffs(vec![
            Rat::zero(),
            half.clone(),
            half.clone(),
            half,
        ]);
        assert_eq!(bracket_factor(1, 1, 2, 3), expect);
    }

    #[test]
    fn bracket_factor_matches_direct_summation() {
        for s in 1..=8 {
            assert_eq!(
                bracket_factor(1, s, 0, 30),
                factor_oracle(1, s, 0, 30),
                "s = {s}"
            );
        }
        for (n, s, r) in [(2, 3, 1), (3, 2, 2), (4, 1, 3), (5, 4, 0)] {
            assert_eq!(
                bracket_factor(n, s, r, 30),
                factor_oracle(n, s, r, 30),
                "(n,s,r) = ({n},{s},{r})"
            );
        }
    }

    #[test]
    fn inversion_helper() {
        for (n, s) in [(1u32, 1u32), (2, 3), (3, 2)] {
            let f = bracket_factor(n as usize, s, 0, 25);
            let back = &(&f * &QSeries::one_minus_qn_pow(n as usize, s, 25))
                .scale(&Rat::from_bigint(factorial(s - 1)));
            assert_eq!(*back, eulerian_poly(s).eval_q_power(n as usize, 25));
        }
    }

    #[test]
    fn recip_and_div() {
        let a = ser(&[1, -1, 0, 0, 0, 0]);
        let inv = a.recip().unwrap();
        assert_eq!(inv, ser(&[1, 1, 1, 1, 1, 1]));
        assert!(QSeries::zero(3).recip().is_err());
        let b = ser(&[2, 1, 5, -3]);
        assert_eq!(b.div_unit(&b).unwrap(), QSeries::one(3));
    }

    #[test]
    fn json_form() {
        let s = QSeries::from_coeffs(vec![Rat::zero(), Rat::new(1, 2)]);
        let js = serde_json::to_value(&s).unwrap();
        assert_eq!(js, serde_json::json!({"precision": 1, "coeffs": ["0", "1/2"]}));
        let back: QSeries = serde_json::from_value(js).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_value::<QSeries>(
            serde_json::json!({"precision": 3, "coeffs": ["0"]})
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn mul_commutative_associative(a in proptest::collection::vec(-9i64..9, 26),
                                       b in proptest::collection::vec(-9i64..9, 26),
                                       c in proptest::collection::vec(-9i64..9, 26)) {
            let a = ser(&a); let b = ser(&b); let c = ser(&c);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn q_d_dq_is_a_derivation(a in proptest::collection::vec(-9i64..9, 26),
                                  b in proptest::collection::vec(-9i64..9, 26)) {
            let a = ser(&a); let b = ser(&b);
            let lhs = (&a * &b).q_d_dq();
            let rhs = &(&a.q_d_dq() * &b) + &(&a * &b.q_d_dq());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
