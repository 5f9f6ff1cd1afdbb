//! Exact scalar arithmetic: arbitrary-precision rationals, binomial
//! coefficients, Bernoulli numbers and the lambda coefficients that drive the
//! stuffle product.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::QbracketError;

/// Arbitrary-precision rational number, always in lowest terms with a
/// positive denominator. The coefficient field for everything in this crate.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    /// Build `num/den`. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rat(BigRational::from_integer(n))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Rat(BigRational::new(num, den))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "division by zero");
        Rat(self.0.recip())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Rat::one();
        for _ in 0..exp {
            acc *= self.clone();
        }
        acc
    }

    /// Approximate value as `f64`; only used for display and numeric
    /// cross-checks, never inside exact computations.
    pub fn to_f64(&self) -> f64 {
        let digits = 18;
        let scale = BigInt::from(10u64).pow(digits);
        let scaled = (self.0.numer() * &scale) / self.0.denom();
        let s = scaled.to_string();
        s.parse::<f64>().map(|v| v / 1e18).unwrap_or(f64::NAN)
    }

    /// Decimal rendering with the requested number of digits after the point,
    /// truncated towards zero.
    pub fn to_decimal(&self, digits: u32) -> String {
        let neg = self.0.is_negative();
        let a = self.0.abs();
        let scale = BigInt::from(10u64).pow(digits);
        let scaled = (a.numer() * &scale) / a.denom();
        let s = scaled.to_string();
        let (int_part, frac_part) = if s.len() > digits as usize {
            let split = s.len() - digits as usize;
            (s[..split].to_string(), s[split..].to_string())
        } else {
            ("0".to_string(), format!("{:0>width$}", s, width = digits as usize))
        };
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rat {
    type Err = QbracketError;

    /// Parses `"p"` or `"p/q"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || QbracketError::Parse(format!("invalid rational: {s:?}"));
        match s.split_once('/') {
            None => {
                let n = BigInt::from_str(s.trim()).map_err(|_| bad())?;
                Ok(Rat::from_bigint(n))
            }
            Some((p, q)) => {
                let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
                let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
                if q.is_zero() {
                    return Err(bad());
                }
                Ok(Rat::from_big(p, q))
            }
        }
    }
}

macro_rules! rat_from_int {
    ($($t:ty),+) => {
        $(impl From<$t> for Rat {
            fn from(n: $t) -> Self {
                Rat(BigRational::from_integer(BigInt::from(n)))
            }
        })+
    };
}

rat_from_int!(i32, i64, u32, u64, usize);

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat($trait::$method(self.0, rhs.0))
            }
        }
        impl<'a> $trait<&'a Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                Rat($trait::$method(&self.0, &rhs.0))
            }
        }
        impl<'a> $trait<&'a Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                Rat($trait::$method(self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        assert!(!rhs.is_zero(), "division by zero");
        Rat(self.0 / rhs.0)
    }
}

impl<'a> Div<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn div(self, rhs: &'a Rat) -> Rat {
        assert!(!rhs.is_zero(), "division by zero");
        Rat(&self.0 / &rhs.0)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl AddAssign for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Rat {
    fn sub_assign(&mut self, rhs: Rat) {
        self.0 -= rhs.0;
    }
}

impl MulAssign for Rat {
    fn mul_assign(&mut self, rhs: Rat) {
        self.0 *= rhs.0;
    }
}

impl std::iter::Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |a, b| a + b)
    }
}

impl serde::Serialize for Rat {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Rat {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Factorial as an exact integer.
pub fn factorial(n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}

/// Binomial coefficient C(n, k), total over all integer arguments: zero when
/// `k < 0`, `k > n` or `n < 0 <= k`.
pub fn binomial(n: i64, k: i64) -> Rat {
    if k < 0 || k > n {
        return Rat::zero();
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    Rat::from_big(num, den)
}

static BERNOULLI_CACHE: Mutex<Vec<Rat>> = Mutex::new(Vec::new());

/// Bernoulli number B_n under the convention x/(e^x - 1) = sum B_k x^k / k!,
/// so B_1 = -1/2. Computed from the recurrence
/// sum_{k=0}^{n} C(n+1, k) B_k = 0 and memoized.
pub fn bernoulli(n: u32) -> Rat {
    let mut cache = BERNOULLI_CACHE.lock().unwrap();
    if cache.is_empty() {
        cache.push(Rat::one());
    }
    while cache.len() <= n as usize {
        let m = cache.len() as i64;
        let mut sum = Rat::zero();
        for (k, b) in cache.iter().enumerate() {
            sum += binomial(m + 1, k as i64) * b.clone();
        }
        let value = -sum / Rat::from(m + 1);
        cache.push(value);
    }
    cache[n as usize].clone()
}

/// Stuffle coefficient
/// lambda^j_{a,b} = (-1)^{b-1} C(a+b-j-1, a-j) B_{a+b-j} / (a+b-j)!.
///
/// Rejects `j` outside `1..=a`; the shuffle closed form additionally needs
/// `j = 0`, which [`lambda_coeff_raw`] provides.
pub fn lambda_coeff(a: u32, b: u32, j: i64) -> Result<Rat, QbracketError> {
    if j < 1 || j > a as i64 {
        return Err(QbracketError::Domain(format!(
            "lambda_coeff: j = {j} outside 1..={a}"
        )));
    }
    Ok(lambda_coeff_raw(a, b, j as u32))
}

/// The same formula without the range guard, valid for any 0 <= j <= a.
pub fn lambda_coeff_raw(a: u32, b: u32, j: u32) -> Rat {
    debug_assert!(j <= a);
    let m = a + b - j;
    let sign = if b % 2 == 1 { Rat::one() } else { -Rat::one() };
    sign * binomial(m as i64 - 1, (a - j) as i64) * bernoulli(m)
        / Rat::from_bigint(factorial(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binomial_basics() {
        assert_eq!(binomial(5, 2), Rat::from(10));
        assert_eq!(binomial(3, 5), Rat::zero());
        assert_eq!(binomial(4, -1), Rat::zero());
        assert_eq!(binomial(-2, 0), Rat::zero());
        assert_eq!(binomial(0, 0), Rat::one());
    }

    #[test]
    fn binomial_pascal_rule() {
        // n = 0 is excluded: with the total convention C(-1, .) = 0, so the
        // rule cannot produce C(0,0) = 1.
        assert_eq!(binomial(0, 0), Rat::one());
        for n in 1..=20i64 {
            for k in 0..=n {
                assert_eq!(
                    binomial(n, k),
                    binomial(n - 1, k) + binomial(n - 1, k - 1),
                    "Pascal fails at ({n},{k})"
                );
            }
        }
    }

    /// Independent oracle: extract B_n from the exact series division of x by
    /// (e^x - 1). Writing (e^x - 1)/x = sum_j x^j/(j+1)!, the defining
    /// identity forces sum_{k<=m} B_k / (k! (m-k+1)!) = [m = 0], which is
    /// solved coefficient by coefficient.
    fn bernoulli_by_series(n: usize) -> Rat {
        let mut b: Vec<Rat> = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let mut sum = Rat::zero();
            for (k, bk) in b.iter().enumerate() {
                sum += bk.clone()
                    / Rat::from_bigint(factorial(k as u32) * factorial((m - k + 1) as u32));
            }
            let target = if m == 0 { Rat::one() } else { Rat::zero() };
            b.push((target - sum) * Rat::from_bigint(factorial(m as u32)));
        }
        b[n].clone()
    }

    #[test]
    fn bernoulli_matches_series_division_oracle() {
        assert_eq!(bernoulli(0), Rat::one());
        for n in 0..=12 {
            assert_eq!(bernoulli(n), bernoulli_by_series(n as usize), "B_{n}");
        }
        assert_eq!(bernoulli(1), Rat::new(-1, 2));
        assert_eq!(bernoulli(2), Rat::new(1, 6));
        assert_eq!(bernoulli(7), Rat::zero());
    }

    #[test]
    fn odd_bernoulli_vanish() {
        for n in 1..=10u32 {
            assert_eq!(bernoulli(2 * n + 1), Rat::zero(), "B_{}", 2 * n + 1);
        }
    }

    #[test]
    fn lambda_values() {
        // lambda^2_{2,2} = -C(1,0) B_2 / 2! = -1/12
        assert_eq!(lambda_coeff(2, 2, 2).unwrap(), Rat::new(-1, 12));
        // lambda^1_{2,2} involves B_3 = 0
        assert_eq!(lambda_coeff(2, 2, 1).unwrap(), Rat::zero());
        assert!(lambda_coeff(2, 2, 0).is_err());
        assert!(lambda_coeff(2, 2, 3).is_err());
    }

    #[test]
    fn lambda_j1_antisymmetry() {
        // The coefficient of the non-admissible word in the diamond product
        // cancels for every pair except s = t = 1, where B_1 != 0 enters.
        for s in 1..=10u32 {
            for t in 1..=10u32 {
                if s == 1 && t == 1 {
                    continue;
                }
                let sum = lambda_coeff(s, t, 1).unwrap() + lambda_coeff(t, s, 1).unwrap();
                assert!(sum.is_zero(), "lambda^1_{{{s},{t}}} + lambda^1_{{{t},{s}}} != 0");
            }
        }
        let diag = lambda_coeff(1, 1, 1).unwrap() + lambda_coeff(1, 1, 1).unwrap();
        assert_eq!(diag, Rat::from(-1));
    }

    #[test]
    fn rat_parse_display_roundtrip() {
        for s in ["0", "-7", "3/4", "-22/7"] {
            let r: Rat = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        assert!("1/0".parse::<Rat>().is_err());
        assert!("abc".parse::<Rat>().is_err());
        // normalization
        assert_eq!("4/8".parse::<Rat>().unwrap().to_string(), "1/2");
        assert_eq!("3/-9".parse::<Rat>().unwrap().to_string(), "-1/3");
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(Rat::new(1, 4).to_decimal(3), "0.250");
        assert_eq!(Rat::new(-11, 6).to_decimal(4), "-1.8333");
        assert_eq!(Rat::from(5).to_decimal(0), "5");
    }

    proptest! {
        #[test]
        fn rat_field_laws(a in -50i64..50, b in 1i64..20, c in -50i64..50,
                          d in 1i64..20, e in -50i64..50, f in 1i64..20) {
            let x = Rat::new(a, b);
            let y = Rat::new(c, d);
            let z = Rat::new(e, f);
            prop_assert_eq!(&x + &y, &y + &x);
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!((x.clone() + y.clone()) + z.clone(), x.clone() + (y.clone() + z.clone()));
            prop_assert_eq!((x.clone() * y.clone()) * z.clone(), x.clone() * (y.clone() * z.clone()));
            prop_assert_eq!(x.clone() * (y.clone() + z.clone()), x.clone() * y.clone() + x * z);
        }
    }
}
