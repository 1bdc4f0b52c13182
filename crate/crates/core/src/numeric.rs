//! Exact rational numbers backed by `i128`.
//!
//! Every coordinate, distance and time in the crate is a [`Rational`]. All
//! arithmetic is checked: an intermediate that does not fit in 128 bits is
//! reported as [`RationalError::Overflow`] instead of wrapping.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("integer overflow in rational arithmetic")]
    Overflow,
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse {0:?} as a rational (expected \"p\" or \"p/q\")")]
    Parse(String),
}

/// A fraction `numerator / denominator` in lowest terms with a positive
/// denominator.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i128,
    den: i128,
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    /// Builds `num / den` in canonical form.
    pub fn new(num: i128, den: i128) -> Result<Self, RationalError> {
        if den == 0 {
            return Err(RationalError::ZeroDenominator);
        }
        let g = gcd(num.unsigned_abs(), den.unsigned_abs());
        // g >= 1 because den != 0; g divides both magnitudes, so the quotients fit
        // except for the single case i128::MIN / 1, handled by the negation below.
        let g = g as i128;
        let (mut n, mut d) = if g == i128::MIN {
            // only possible when both are i128::MIN
            (1, 1)
        } else {
            (num / g, den / g)
        };
        if d < 0 {
            n = n.checked_neg().ok_or(RationalError::Overflow)?;
            d = d.checked_neg().ok_or(RationalError::Overflow)?;
        }
        Ok(Rational { num: n, den: d })
    }

    pub const fn from_integer(n: i128) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn numerator(&self) -> i128 {
        self.num
    }

    pub fn denominator(&self) -> i128 {
        self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_negative(&self) -> bool {
        self.num < 0
    }

    pub fn checked_add(self, rhs: Rational) -> Result<Rational, RationalError> {
        let g = gcd(self.den as u128, rhs.den as u128) as i128;
        let lhs_scale = rhs.den / g;
        let rhs_scale = self.den / g;
        let a = self.num.checked_mul(lhs_scale).ok_or(RationalError::Overflow)?;
        let b = rhs.num.checked_mul(rhs_scale).ok_or(RationalError::Overflow)?;
        let num = a.checked_add(b).ok_or(RationalError::Overflow)?;
        let den = self.den.checked_mul(lhs_scale).ok_or(RationalError::Overflow)?;
        Rational::new(num, den)
    }

    pub fn checked_neg(self) -> Result<Rational, RationalError> {
        Ok(Rational {
            num: self.num.checked_neg().ok_or(RationalError::Overflow)?,
            den: self.den,
        })
    }

    pub fn checked_sub(self, rhs: Rational) -> Result<Rational, RationalError> {
        self.checked_add(rhs.checked_neg()?)
    }

    pub fn checked_mul(self, rhs: Rational) -> Result<Rational, RationalError> {
        // cross-cancel first so that products stay as small as possible
        let g1 = gcd(self.num.unsigned_abs(), rhs.den as u128).max(1) as i128;
        let g2 = gcd(rhs.num.unsigned_abs(), self.den as u128).max(1) as i128;
        let num = (self.num / g1)
            .checked_mul(rhs.num / g2)
            .ok_or(RationalError::Overflow)?;
        let den = (self.den / g2)
            .checked_mul(rhs.den / g1)
            .ok_or(RationalError::Overflow)?;
        Rational::new(num, den)
    }

    pub fn checked_div(self, rhs: Rational) -> Result<Rational, RationalError> {
        if rhs.num == 0 {
            return Err(RationalError::DivisionByZero);
        }
        self.checked_mul(rhs.recip_unchecked()?)
    }

    fn recip_unchecked(self) -> Result<Rational, RationalError> {
        Rational::new(self.den, self.num)
    }

    pub fn checked_abs(self) -> Result<Rational, RationalError> {
        if self.num < 0 {
            self.checked_neg()
        } else {
            Ok(self)
        }
    }

    pub fn checked_mul_int(self, k: i128) -> Result<Rational, RationalError> {
        self.checked_mul(Rational::from_integer(k))
    }

    /// Largest integer `<= self`.
    pub fn floor(&self) -> i128 {
        self.num.div_euclid(self.den)
    }

    /// Smallest integer `>= self`.
    pub fn ceil(&self) -> i128 {
        let f = self.floor();
        if self.num.rem_euclid(self.den) == 0 {
            f
        } else {
            f + 1
        }
    }

    pub fn max(self, other: Rational) -> Rational {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Rational) -> Rational {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Compares `an/ad` with `bn/bd` (positive denominators) by continued-fraction
/// expansion, so no product is ever formed.
fn cmp_fractions(mut an: i128, mut ad: i128, mut bn: i128, mut bd: i128) -> Ordering {
    let mut flipped = false;
    loop {
        let aq = an.div_euclid(ad);
        let bq = bn.div_euclid(bd);
        let ar = an.rem_euclid(ad);
        let br = bn.rem_euclid(bd);
        let ord = aq.cmp(&bq);
        if ord != Ordering::Equal {
            return if flipped { ord.reverse() } else { ord };
        }
        let ord = match (ar == 0, br == 0) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        };
        if let Some(ord) = ord {
            return if flipped { ord.reverse() } else { ord };
        }
        // ar/ad vs br/bd, both in (0,1): compare reciprocals with the order reversed
        let (nan, nad, nbn, nbd) = (ad, ar, bd, br);
        an = nan;
        ad = nad;
        bn = nbn;
        bd = nbd;
        flipped = !flipped;
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_fractions(self.num, self.den, other.num, other.den)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n as i128)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::from_integer(n as i128)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Rational {
    type Err = RationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| {
            t.trim()
                .parse::<i128>()
                .map_err(|_| RationalError::Parse(s.to_string()))
        };
        match s.split_once('/') {
            Some((n, d)) => Rational::new(parse(n)?, parse(d)?),
            None => Ok(Rational::from_integer(parse(s)?)),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RationalVisitor;

        impl Visitor<'_> for RationalVisitor {
            type Value = Rational;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational as \"p/q\", \"p\", or an integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
                Ok(Rational::from_integer(v as i128))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
                Ok(Rational::from_integer(v as i128))
            }
        }

        deserializer.deserialize_any(RationalVisitor)
    }
}

/// Least common multiple of two positive integers, checked.
pub fn lcm(a: i128, b: i128) -> Result<i128, RationalError> {
    let g = gcd(a.unsigned_abs(), b.unsigned_abs()) as i128;
    (a / g).checked_mul(b).ok_or(RationalError::Overflow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn construction_normalizes() {
        assert_eq!(r(2, 4), r(1, 2));
        assert_eq!((r(2, 4).numerator(), r(2, 4).denominator()), (1, 2));
        let neg = r(3, -6);
        assert_eq!((neg.numerator(), neg.denominator()), (-1, 2));
        let zero = r(0, 7);
        assert_eq!((zero.numerator(), zero.denominator()), (0, 1));
        assert_eq!(Rational::new(1, 0), Err(RationalError::ZeroDenominator));
    }

    #[test]
    fn basic_arithmetic() {
        assert_eq!(r(1, 2).checked_add(r(1, 3)).unwrap(), r(5, 6));
        assert_eq!(r(1, 2).cmp(&r(2, 4)), Ordering::Equal);
        assert_eq!(r(-7, 2).checked_abs().unwrap(), r(7, 2));
        assert_eq!(r(3, 4).checked_mul(r(2, 3)).unwrap(), r(1, 2));
        assert_eq!(r(3, 4).checked_sub(r(1, 4)).unwrap(), r(1, 2));
        assert_eq!(r(1, 2).checked_div(r(1, 4)).unwrap(), r(2, 1));
        assert_eq!(r(1, 2).checked_div(Rational::ZERO), Err(RationalError::DivisionByZero));
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(r(7, 2).floor(), 3);
        assert_eq!(r(7, 2).ceil(), 4);
        assert_eq!(r(-7, 2).floor(), -4);
        assert_eq!(r(-7, 2).ceil(), -3);
        assert_eq!(r(6, 3).ceil(), 2);
    }

    #[test]
    fn overflow_is_reported() {
        let big = Rational::from_integer(i128::MAX - 1);
        assert_eq!(big.checked_add(big), Err(RationalError::Overflow));
        assert_eq!(big.checked_mul_int(3), Err(RationalError::Overflow));
        let min = Rational::from_integer(i128::MIN);
        assert_eq!(min.checked_neg(), Err(RationalError::Overflow));
        assert_eq!(min.checked_abs(), Err(RationalError::Overflow));
        // denominators that are coprime and large overflow on cross-multiplication
        let a = r(1, (1i128 << 100) + 1);
        let b = r(1, (1i128 << 100) - 1);
        assert_eq!(a.checked_add(b), Err(RationalError::Overflow));
    }

    #[test]
    fn compare_never_overflows() {
        let a = r(i128::MAX, i128::MAX - 2);
        let b = r(i128::MAX - 1, i128::MAX - 3);
        // a = 1 + 2/(M-2), b = 1 + 2/(M-3): b is larger
        assert!(a < b);
        assert!(r(i128::MIN + 1, 3) < r(i128::MAX, 5));
    }

    #[test]
    fn text_form() {
        assert_eq!(r(-3, 4).to_string(), "-3/4");
        assert_eq!(r(8, 4).to_string(), "2");
        assert_eq!("6/-4".parse::<Rational>().unwrap(), r(-3, 2));
        assert_eq!("17".parse::<Rational>().unwrap(), r(17, 1));
        assert_eq!("1/0".parse::<Rational>(), Err(RationalError::ZeroDenominator));
        assert!(matches!("x/2".parse::<Rational>(), Err(RationalError::Parse(_))));
    }

    #[test]
    fn serde_accepts_strings_and_integers() {
        let v: Vec<Rational> = serde_json::from_str(r#"["1/2", 3, "-4"]"#).unwrap();
        assert_eq!(v, vec![r(1, 2), r(3, 1), r(-4, 1)]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["1/2","3","-4"]"#);
    }

    fn small() -> impl Strategy<Value = Rational> {
        (-10_000i128..10_000, 1i128..500).prop_map(|(n, d)| r(n, d))
    }

    proptest! {
        #[test]
        fn add_commutes_and_cancels(a in small(), b in small()) {
            let ab = a.checked_add(b).unwrap();
            prop_assert_eq!(ab, b.checked_add(a).unwrap());
            prop_assert_eq!(a.checked_add(a.checked_neg().unwrap()).unwrap(), Rational::ZERO);
            prop_assert_eq!(gcd(ab.numerator().unsigned_abs(), ab.denominator() as u128).max(1), 1);
            prop_assert!(ab.denominator() > 0);
        }

        #[test]
        fn order_matches_cross_multiplication(a in small(), b in small()) {
            let lhs = a.numerator() * b.denominator();
            let rhs = b.numerator() * a.denominator();
            prop_assert_eq!(a.cmp(&b), lhs.cmp(&rhs));
        }

        #[test]
        fn text_round_trip(a in small()) {
            prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
        }
    }
}
