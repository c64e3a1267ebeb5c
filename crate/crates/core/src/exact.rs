//! Exact rational arithmetic and exact solving of quadratics over ℚ.
//!
//! Every value that appears in a recurrence tree is a [`Rational`]. Whether a
//! branch stays inside ℚ is decided by [`exact_sqrt`] on the discriminant, so
//! nothing here ever touches floating point.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse {0:?} as a rational (expected \"p\" or \"p/q\")")]
    Parse(String),
}

/// Arbitrary-precision fraction, always stored reduced with a positive
/// denominator (zero is `0/1`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    /// Builds `numer/denom` in lowest terms.
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, ExactError> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    pub fn square(&self) -> Rational {
        Rational(&self.0 * &self.0)
    }

    pub fn pow(&self, exp: u32) -> Rational {
        Rational(num_traits::pow(self.0.clone(), exp as usize))
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational, ExactError> {
        if rhs.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(self.0, rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational($trait::$method(self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

pub fn rat_add(a: &Rational, b: &Rational) -> Rational {
    a + b
}

pub fn rat_sub(a: &Rational, b: &Rational) -> Rational {
    a - b
}

pub fn rat_mul(a: &Rational, b: &Rational) -> Rational {
    a * b
}

pub fn rat_div(a: &Rational, b: &Rational) -> Result<Rational, ExactError> {
    a.checked_div(b)
}

/// `p/q`, with the denominator omitted when it is 1.
impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ExactError::Parse(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                Rational::new(p, q)
            }
            None => s
                .parse::<BigInt>()
                .map(Rational::from_integer)
                .map_err(|_| bad()),
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
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Square root of a nonnegative integer when it is a perfect square.
pub fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    if n.sign() == Sign::Minus {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

/// The nonnegative rational square root of `x`, if `x` is the square of a
/// rational. Negative inputs have none.
pub fn exact_sqrt(x: &Rational) -> Option<Rational> {
    let num = exact_isqrt(x.numer())?;
    let den = exact_isqrt(x.denom())?;
    Some(Rational(BigRational::new(num, den)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootKind {
    TwoRational,
    OneRationalDouble,
    Irrational,
    Complex,
    /// Leading coefficient vanished; at most one root from the linear part.
    DegenerateLinear,
    /// All coefficients of X vanished. `identically_zero` distinguishes
    /// "every X solves it" from "no X solves it".
    Degenerate {
        identically_zero: bool,
    },
}

impl RootKind {
    pub fn is_rational(self) -> bool {
        matches!(
            self,
            RootKind::TwoRational | RootKind::OneRationalDouble | RootKind::DegenerateLinear
        )
    }
}

/// Classified roots of `p2·X² + p1·X + p0`. Rational roots are sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticRoots {
    pub kind: RootKind,
    pub roots: Vec<Rational>,
    pub multiplicities: Vec<u8>,
}

impl QuadraticRoots {
    fn none(kind: RootKind) -> Self {
        QuadraticRoots {
            kind,
            roots: Vec::new(),
            multiplicities: Vec::new(),
        }
    }
}

pub fn discriminant(p2: &Rational, p1: &Rational, p0: &Rational) -> Rational {
    p1.square() - Rational::from(4) * p2 * p0
}

pub fn solve_quadratic(p2: &Rational, p1: &Rational, p0: &Rational) -> QuadraticRoots {
    if p2.is_zero() {
        if p1.is_zero() {
            return QuadraticRoots::none(RootKind::Degenerate {
                identically_zero: p0.is_zero(),
            });
        }
        let root = (-p0).checked_div(p1).expect("p1 checked nonzero");
        return QuadraticRoots {
            kind: RootKind::DegenerateLinear,
            roots: vec![root],
            multiplicities: vec![1],
        };
    }

    let disc = discriminant(p2, p1, p0);
    if disc.is_negative() {
        return QuadraticRoots::none(RootKind::Complex);
    }
    let Some(sqrt_disc) = exact_sqrt(&disc) else {
        return QuadraticRoots::none(RootKind::Irrational);
    };
    let two_a = Rational::from(2) * p2;
    let neg_b = -p1;
    if sqrt_disc.is_zero() {
        let root = neg_b.checked_div(&two_a).expect("p2 checked nonzero");
        return QuadraticRoots {
            kind: RootKind::OneRationalDouble,
            roots: vec![root],
            multiplicities: vec![2],
        };
    }
    let r1 = (&neg_b - &sqrt_disc)
        .checked_div(&two_a)
        .expect("p2 checked nonzero");
    let r2 = (&neg_b + &sqrt_disc)
        .checked_div(&two_a)
        .expect("p2 checked nonzero");
    let mut roots = vec![r1, r2];
    roots.sort();
    QuadraticRoots {
        kind: RootKind::TwoRational,
        roots,
        multiplicities: vec![1, 1],
    }
}

/// `p2·x² + p1·x + p0`.
pub fn eval_quadratic(p2: &Rational, p1: &Rational, p0: &Rational, x: &Rational) -> Rational {
    p2 * &x.square() + p1 * x + p0.clone()
}

impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        self.0.is_integer() && self.0.numer() == &BigInt::from(*other)
    }
}

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.0.cmp(&BigRational::from_integer(BigInt::from(*other))))
    }
}
