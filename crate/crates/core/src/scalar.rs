//! Exact arithmetic in Q(sqrt2) with total sign determination.
//!
//! Every positivity verdict in this crate reduces to sign computations here.
//! Floating point appears nowhere in a decision path; tests use it only as a
//! cross-check oracle.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use thiserror::Error;

/// Canonical rational: reduced fraction, positive denominator.
/// `num_rational::BigRational` enforces both invariants on construction.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid scalar literal {0:?}: {1}")]
    BadLiteral(String, &'static str),
}

/// An element `rat + irr*sqrt(2)` of Q(sqrt2).
///
/// The representation is unique because sqrt2 is irrational, so derived
/// equality is field equality and zero is structural.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuadScalar {
    /// Coefficient of 1.
    pub rat: Rational,
    /// Coefficient of sqrt2.
    pub irr: Rational,
}

fn rational_sign(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl QuadScalar {
    pub fn new(rat: Rational, irr: Rational) -> Self {
        QuadScalar { rat, irr }
    }

    pub fn zero() -> Self {
        QuadScalar::new(Rational::zero(), Rational::zero())
    }

    pub fn one() -> Self {
        QuadScalar::new(Rational::one(), Rational::zero())
    }

    pub fn sqrt2() -> Self {
        QuadScalar::new(Rational::zero(), Rational::one())
    }

    pub fn from_int(v: i64) -> Self {
        QuadScalar::new(Rational::from_integer(BigInt::from(v)), Rational::zero())
    }

    /// The rational p/q as a scalar. Panics if q = 0.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        QuadScalar::new(
            Rational::new(BigInt::from(p), BigInt::from(q)),
            Rational::zero(),
        )
    }

    pub fn from_rational(r: Rational) -> Self {
        QuadScalar::new(r, Rational::zero())
    }

    /// `(p + q*sqrt2) / d`; convenient for literal matrix entries. Panics if d = 0.
    pub fn quad(p: i64, q: i64, d: i64) -> Self {
        QuadScalar::new(
            Rational::new(BigInt::from(p), BigInt::from(d)),
            Rational::new(BigInt::from(q), BigInt::from(d)),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.irr.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.irr.is_zero()
    }

    /// Exact sign of the real number rat + irr*sqrt2.
    ///
    /// When the two coefficients agree in sign (or one vanishes) the answer is
    /// immediate. Otherwise the dominant term decides: for rat > 0 > irr the
    /// number is positive iff rat^2 > 2*irr^2, and symmetrically. No root is
    /// ever extracted.
    pub fn sign(&self) -> i8 {
        let sr = rational_sign(&self.rat);
        let si = rational_sign(&self.irr);
        if sr == 0 {
            return si;
        }
        if si == 0 || si == sr {
            return sr;
        }
        // Opposite strict signs: compare rat^2 with 2*irr^2.
        let diff = &self.rat * &self.rat - &self.irr * &self.irr * Rational::from_integer(2.into());
        sr * rational_sign(&diff)
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign() < 0
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse via the conjugate: 1/(a+b*sqrt2) =
    /// (a-b*sqrt2)/(a^2-2b^2). The norm vanishes only at zero.
    pub fn inverse(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let norm =
            &self.rat * &self.rat - &self.irr * &self.irr * Rational::from_integer(2.into());
        Ok(QuadScalar::new(&self.rat / &norm, -(&self.irr / &norm)))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        Ok(self * &rhs.inverse()?)
    }

    /// Integer power; negative exponents invert (error on zero base).
    pub fn pow(&self, e: i32) -> Result<Self, ScalarError> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = QuadScalar::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }
}

impl From<i64> for QuadScalar {
    fn from(v: i64) -> Self {
        QuadScalar::from_int(v)
    }
}

impl From<Rational> for QuadScalar {
    fn from(r: Rational) -> Self {
        QuadScalar::from_rational(r)
    }
}

impl Add for &QuadScalar {
    type Output = QuadScalar;
    fn add(self, rhs: &QuadScalar) -> QuadScalar {
        QuadScalar::new(&self.rat + &rhs.rat, &self.irr + &rhs.irr)
    }
}

impl Sub for &QuadScalar {
    type Output = QuadScalar;
    fn sub(self, rhs: &QuadScalar) -> QuadScalar {
        QuadScalar::new(&self.rat - &rhs.rat, &self.irr - &rhs.irr)
    }
}

impl Mul for &QuadScalar {
    type Output = QuadScalar;
    fn mul(self, rhs: &QuadScalar) -> QuadScalar {
        // (a + b s)(c + d s) = (ac + 2bd) + (ad + bc) s, where s^2 = 2.
        let two = Rational::from_integer(2.into());
        QuadScalar::new(
            &self.rat * &rhs.rat + &self.irr * &rhs.irr * &two,
            &self.rat * &rhs.irr + &self.irr * &rhs.rat,
        )
    }
}

impl Div for &QuadScalar {
    type Output = QuadScalar;
    fn div(self, rhs: &QuadScalar) -> QuadScalar {
        self.checked_div(rhs).expect("scalar division by zero")
    }
}

impl Neg for &QuadScalar {
    type Output = QuadScalar;
    fn neg(self) -> QuadScalar {
        QuadScalar::new(-&self.rat, -&self.irr)
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for QuadScalar {
            type Output = QuadScalar;
            fn $m(self, rhs: QuadScalar) -> QuadScalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&QuadScalar> for QuadScalar {
            type Output = QuadScalar;
            fn $m(self, rhs: &QuadScalar) -> QuadScalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<QuadScalar> for &QuadScalar {
            type Output = QuadScalar;
            fn $m(self, rhs: QuadScalar) -> QuadScalar {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);
forward_owned_binop!(Div, div);

impl Neg for QuadScalar {
    type Output = QuadScalar;
    fn neg(self) -> QuadScalar {
        -&self
    }
}

impl AddAssign<&QuadScalar> for QuadScalar {
    fn add_assign(&mut self, rhs: &QuadScalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&QuadScalar> for QuadScalar {
    fn sub_assign(&mut self, rhs: &QuadScalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&QuadScalar> for QuadScalar {
    fn mul_assign(&mut self, rhs: &QuadScalar) {
        *self = &*self * rhs;
    }
}

impl PartialOrd for QuadScalar {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadScalar {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self - other).sign() {
            1 => std::cmp::Ordering::Greater,
            -1 => std::cmp::Ordering::Less,
            _ => std::cmp::Ordering::Equal,
        }
    }
}

// Literal grammar, shared with the CLI and all file formats:
//   scalar := rat | rat ("+"|"-") urat "r2" | ("-")? urat "r2"
//   rat    := ("-")? digits ("/" digits)?
//   urat   := digits ("/" digits)?
// No whitespace anywhere inside a literal.

fn parse_urat(s: &str, lit: &str) -> Result<Rational, ScalarError> {
    let bad = |m| ScalarError::BadLiteral(lit.to_owned(), m);
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    if num.is_empty() || !num.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad("expected digits"));
    }
    let n: BigInt = num.parse().expect("digit string");
    let d: BigInt = match den {
        Some(d) => {
            if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad("expected digits after '/'"));
            }
            d.parse().expect("digit string")
        }
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Rational::new(n, d))
}

fn parse_rat(s: &str, lit: &str) -> Result<Rational, ScalarError> {
    match s.strip_prefix('-') {
        Some(rest) => Ok(-parse_urat(rest, lit)?),
        None => parse_urat(s, lit),
    }
}

impl FromStr for QuadScalar {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |m| ScalarError::BadLiteral(s.to_owned(), m);
        if s.is_empty() {
            return Err(bad("empty"));
        }
        let Some(body) = s.strip_suffix("r2") else {
            return Ok(QuadScalar::from_rational(parse_rat(s, s)?));
        };
        // A '+' or '-' past position 0 separates the rational part from the
        // sqrt2 coefficient; signs inside a rational occur only at position 0.
        let sep = body
            .bytes()
            .enumerate()
            .rev()
            .find(|&(i, b)| i > 0 && (b == b'+' || b == b'-'));
        match sep {
            Some((i, b)) => {
                let rat = parse_rat(&body[..i], s)?;
                let mag = parse_urat(&body[i + 1..], s)?;
                let irr = if b == b'-' { -mag } else { mag };
                Ok(QuadScalar::new(rat, irr))
            }
            None => Ok(QuadScalar::new(Rational::zero(), parse_rat(body, s)?)),
        }
    }
}

impl fmt::Display for QuadScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.irr.is_zero() {
            return write!(f, "{}", self.rat);
        }
        if self.rat.is_zero() {
            return write!(f, "{}r2", self.irr);
        }
        if self.irr.is_positive() {
            write!(f, "{}+{}r2", self.rat, self.irr)
        } else {
            write!(f, "{}-{}r2", self.rat, -&self.irr)
        }
    }
}

impl Serialize for QuadScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuadScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}
