//! Scalar abstraction shared by every probability-valued computation.
//!
//! Testers, spectra and the LP engine are written once against [`Scalar`] and
//! instantiated either with exact rationals ([`Rational`](crate::Rational)) or
//! with IEEE floats. Exact instances compare with `==`; float instances use a
//! fixed absolute tolerance.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Absolute tolerance used by float instances when comparing probabilities.
pub const FLOAT_TOL: f64 = 1e-12;

pub trait Scalar:
    Num + Signed + Clone + PartialOrd + fmt::Debug + Send + Sync + 'static
{
    /// True when arithmetic is exact and comparisons need no tolerance.
    const EXACT: bool;

    fn from_ratio(num: i64, den: u64) -> Self;

    fn from_count(c: usize) -> Self {
        Self::from_ratio(c as i64, 1)
    }

    fn to_f64(&self) -> f64;

    /// Largest integer not exceeding `self`, if it fits.
    fn floor_u64(&self) -> Option<u64>;

    /// Tolerance below which a float is treated as zero. Zero for exact types.
    fn tolerance() -> Self;

    /// Parse `p/q`, an integer, or a decimal literal.
    fn parse_prob(s: &str) -> Option<Self>;

    /// Text form used in files and JSON: `p/q` for exact types, shortest
    /// round-trip decimal for floats.
    fn render(&self) -> String;

    fn approx_eq(&self, other: &Self) -> bool {
        if Self::EXACT {
            self == other
        } else {
            (self.clone() - other.clone()).abs() <= Self::tolerance()
        }
    }

    /// `self >= other` up to tolerance.
    fn approx_ge(&self, other: &Self) -> bool {
        if Self::EXACT {
            self >= other
        } else {
            self.clone() + Self::tolerance() >= *other
        }
    }

    /// `self > 0` beyond tolerance.
    fn is_pos(&self) -> bool {
        *self > Self::tolerance()
    }

    fn powu(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

fn parse_float_like<T: FromStr>(s: &str) -> Option<(T, Option<T>)> {
    match s.split_once('/') {
        Some((p, q)) => Some((p.trim().parse().ok()?, Some(q.trim().parse().ok()?))),
        None => Some((s.trim().parse().ok()?, None)),
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn floor_u64(&self) -> Option<u64> {
        let f = self.floor();
        (f >= 0.0 && f < u64::MAX as f64).then_some(f as u64)
    }

    fn tolerance() -> Self {
        FLOAT_TOL
    }

    fn parse_prob(s: &str) -> Option<Self> {
        let (p, q): (f64, Option<f64>) = parse_float_like(s)?;
        match q {
            Some(q) if q != 0.0 => Some(p / q),
            Some(_) => None,
            None => Some(p),
        }
    }

    fn render(&self) -> String {
        format!("{self}")
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: u64) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn floor_u64(&self) -> Option<u64> {
        (*self as f64).floor_u64()
    }

    fn tolerance() -> Self {
        1e-6
    }

    fn parse_prob(s: &str) -> Option<Self> {
        f64::parse_prob(s).map(|v| v as f32)
    }

    fn render(&self) -> String {
        format!("{self}")
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn floor_u64(&self) -> Option<u64> {
        self.floor().to_integer().to_u64()
    }

    fn tolerance() -> Self {
        BigRational::zero()
    }

    fn parse_prob(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            return Some(BigRational::new(p, q));
        }
        if let Ok(i) = s.parse::<BigInt>() {
            return Some(BigRational::from_integer(i));
        }
        // Decimal literal: read it exactly, not through a float.
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int, frac) = body.split_once('.')?;
        if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits: BigInt = format!("{int}{frac}").parse().ok()?;
        let den = num_traits::pow(BigInt::from(10u32), frac.len());
        let v = BigRational::new(digits, den);
        Some(if neg { -v } else { v })
    }

    fn render(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
}

/// Convert between scalar instances. Exact → float is lossy; float → exact
/// goes through the binary expansion of the float.
pub fn convert<A: Scalar, B: Scalar>(a: &A) -> B {
    if A::EXACT && B::EXACT {
        // Only one exact instance exists.
        B::parse_prob(&a.render()).expect("exact scalar renders as p/q")
    } else if B::EXACT {
        let r = BigRational::from_f64(a.to_f64()).unwrap_or_else(BigRational::zero);
        B::parse_prob(&r.render()).expect("rational renders as p/q")
    } else {
        B::parse_prob(&format!("{:e}", a.to_f64())).unwrap_or_else(B::zero)
    }
}

/// A ratio that may be `+∞` (distortion, ε/δ with δ = 0).
#[derive(Clone, Debug, PartialEq)]
pub enum Extended<S> {
    Finite(S),
    Infinite,
}

impl<S: Scalar> Extended<S> {
    /// `num / den`, with `+∞` when `den` is zero (within tolerance).
    pub fn ratio(num: S, den: S) -> Self {
        if den.is_pos() {
            Extended::Finite(num / den)
        } else {
            Extended::Infinite
        }
    }

    pub fn finite(&self) -> Option<&S> {
        match self {
            Extended::Finite(s) => Some(s),
            Extended::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinite)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Extended::Finite(s) => s.to_f64(),
            Extended::Infinite => f64::INFINITY,
        }
    }

    /// `self <= other` up to the scalar tolerance.
    pub fn approx_le(&self, other: &Self) -> bool {
        match (self, other) {
            (_, Extended::Infinite) => true,
            (Extended::Infinite, Extended::Finite(_)) => false,
            (Extended::Finite(a), Extended::Finite(b)) => b.approx_ge(a),
        }
    }

    pub fn render(&self) -> String {
        match self {
            Extended::Finite(s) => s.render(),
            Extended::Infinite => "inf".to_string(),
        }
    }
}

impl<S: Scalar> fmt::Display for Extended<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// `1/n` as a scalar.
pub(crate) fn recip<S: Scalar>(n: usize) -> S {
    S::one() / S::from_count(n)
}
