//! Arbitrary-precision rationals plus the handful of exact combinatorial
//! functions (Bernoulli numbers, generalized binomials, factorials) used by
//! every other module.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use core::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational number, always reduced, denominator > 0.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    /// `n/d`, reduced. Panics if `d == 0`.
    pub fn new<N: Into<BigInt>, D: Into<BigInt>>(n: N, d: D) -> Self {
        Rat(BigRational::new(n.into(), d.into()))
    }

    pub fn from_big(n: BigInt) -> Self {
        Rat(BigRational::from_integer(n))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// The numerator, provided the value is an integer.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.to_integer())
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rat(self.0.recip())
    }

    pub fn pow(&self, k: i32) -> Self {
        if k < 0 {
            assert!(!self.is_zero(), "negative power of zero");
        }
        Rat(self.0.pow(k))
    }
}

impl From<i64> for Rat {
    fn from(v: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(v)))
    }
}

impl From<BigInt> for Rat {
    fn from(v: BigInt) -> Self {
        Rat::from_big(v)
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
        fmt::Display::fmt(self, f)
    }
}

/// Parses "p" or "p/q" with optional leading minus.
impl FromStr for Rat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.splitn(2, '/');
        let num = parts
            .next()
            .ok_or_else(|| "empty rational".to_string())?
            .trim();
        let n = BigInt::from_str(num).map_err(|e| e.to_string())?;
        match parts.next() {
            None => Ok(Rat::from_big(n)),
            Some(den) => {
                let d = BigInt::from_str(den.trim()).map_err(|e| e.to_string())?;
                if d.is_zero() {
                    return Err("zero denominator".to_string());
                }
                Ok(Rat::new(n, d))
            }
        }
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((self.0).$method(rhs.0))
            }
        }
        impl $trait<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((&self.0).$method(rhs.0))
            }
        }
    };
}

impl_binop!(Add, add);
impl_binop!(Sub, sub);
impl_binop!(Mul, mul);

impl Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        assert!(!rhs.is_zero(), "division by zero");
        Rat(self.0 / rhs.0)
    }
}

impl Div<&Rat> for &Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
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

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        let lhs = core::mem::take(&mut self.0);
        self.0 = lhs + &rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        let lhs = core::mem::take(&mut self.0);
        self.0 = lhs - &rhs.0;
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        let lhs = core::mem::take(&mut self.0);
        self.0 = lhs * &rhs.0;
    }
}

/// `n!` as a big integer.
pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}

/// `(2d+1)!! = 1*3*5*...*(2d+1)`.
pub fn double_factorial_odd(d: u64) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = 3i64;
    for _ in 0..d {
        acc *= BigInt::from(k);
        k += 2;
    }
    acc
}

/// Integer binomial `C(n, k)` for nonnegative `n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc *= BigInt::from(n - j);
        acc /= BigInt::from(j + 1);
    }
    acc
}

/// Generalized binomial `C(p, k) = p(p-1)...(p-k+1)/k!` for any integer `p`.
///
/// Negative upper arguments occur in the number-level identities, where the
/// exponents `2 - 2g - n + |j|` go negative.
pub fn gen_binom(p: i64, k: u64) -> Rat {
    let mut num = BigInt::one();
    for j in 0..k {
        num *= BigInt::from(p) - BigInt::from(j);
    }
    Rat::new(num, factorial(k))
}

/// The `m`th Bernoulli number, convention `B_1 = -1/2`.
///
/// Computed from the defining recurrence
/// `sum_{j=0}^{m} C(m+1, j) B_j = 0`.
pub fn bernoulli(m: u64) -> Rat {
    bernoulli_upto(m).pop().expect("nonempty")
}

/// `[B_0, ..., B_m]` in one sweep; cheaper when a whole range is consumed.
pub fn bernoulli_upto(m: u64) -> Vec<Rat> {
    let mut b: Vec<Rat> = Vec::with_capacity(m as usize + 1);
    b.push(Rat::one());
    for n in 1..=m {
        if n > 1 && n % 2 == 1 {
            b.push(Rat::zero());
            continue;
        }
        let mut acc = Rat::zero();
        for (j, bj) in b.iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            acc += &(Rat::from_big(binomial(n + 1, j as u64)) * bj);
        }
        b.push(-acc / Rat::from_big(BigInt::from(n + 1)));
    }
    b
}

/// Sign and decimal digits of a `BigInt`, for stable serialization.
pub fn bigint_to_decimal(v: &BigInt) -> String {
    v.to_string()
}

/// Parse a decimal string into an unsigned big integer.
pub fn biguint_from_decimal(s: &str) -> Option<BigUint> {
    let v = BigInt::from_str(s).ok()?;
    match v.sign() {
        Sign::Minus => None,
        _ => Some(v.magnitude().clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bernoulli_small_values() {
        assert_eq!(bernoulli(0), Rat::one());
        assert_eq!(bernoulli(1), Rat::new(-1, 2));
        // B_2 = 1/6, B_4 = -1/30 pin the tanh-half operator expansion.
        assert_eq!(bernoulli(2), Rat::new(1, 6));
        assert_eq!(bernoulli(4), Rat::new(-1, 30));
        assert_eq!(bernoulli(3), Rat::zero());
        assert_eq!(bernoulli(6), Rat::new(1, 42));
        assert_eq!(bernoulli(8), Rat::new(-1, 30));
        assert_eq!(bernoulli(12), Rat::new(-691, 2730));
    }

    #[test]
    fn gen_binom_values() {
        assert_eq!(gen_binom(5, 2), Rat::from(10));
        assert_eq!(gen_binom(-1, 2), Rat::from(1));
        assert_eq!(gen_binom(2, 3), Rat::zero());
        assert_eq!(gen_binom(-3, 3), Rat::from(-10));
        assert_eq!(gen_binom(7, 0), Rat::one());
    }

    #[test]
    fn factorials_and_binomials() {
        assert_eq!(factorial(0), BigInt::from(1));
        assert_eq!(factorial(6), BigInt::from(720));
        assert_eq!(double_factorial_odd(0), BigInt::from(1));
        assert_eq!(double_factorial_odd(2), BigInt::from(15));
        assert_eq!(binomial(14, 7), BigInt::from(3432));
        assert_eq!(binomial(3, 5), BigInt::from(0));
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(Rat::new(3, -6).to_string(), "-1/2");
        assert_eq!(Rat::from(7).to_string(), "7");
        assert_eq!("22/7".parse::<Rat>().unwrap(), Rat::new(22, 7));
        assert_eq!("-5".parse::<Rat>().unwrap(), Rat::from(-5));
        assert!("1/0".parse::<Rat>().is_err());
    }

    proptest! {
        #[test]
        fn additive_and_multiplicative_inverses(a in -200i64..200, b in 1i64..200) {
            let r = Rat::new(a, b);
            prop_assert!((&r + &(-&r)).is_zero());
            if !r.is_zero() {
                prop_assert!((&r * &r.recip()).is_one());
            }
        }

        #[test]
        fn gen_binom_matches_falling_factorial(p in -20i64..=20, k in 0u64..=10) {
            let mut ff = BigInt::one();
            for j in 0..k {
                ff *= BigInt::from(p) - BigInt::from(j);
            }
            prop_assert_eq!(gen_binom(p, k) * Rat::from_big(factorial(k)), Rat::from_big(ff));
        }
    }
}
