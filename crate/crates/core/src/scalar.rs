//! Arithmetic backends for tree computations.
//!
//! Every function value, average and central integral is computed in a
//! [`Scalar`]. Two backends exist: `f64` for floating mode and [`Rational`]
//! (arbitrary precision) for exact mode. Fractional powers and the final
//! `p`-th roots are always taken in `f64`.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number used in exact arithmetic mode.
pub type Rational = num_rational::BigRational;

/// Arithmetic mode of a tree or a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithmeticMode {
    Exact,
    Floating,
}

/// Probability of an atom, carried both exactly (when known) and as `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    exact: Option<Rational>,
    value: f64,
}

impl Measure {
    pub fn exact(r: Rational) -> Self {
        let value = ToPrimitive::to_f64(&r).unwrap_or(f64::NAN);
        Measure {
            exact: Some(r),
            value,
        }
    }

    pub fn floating(value: f64) -> Self {
        Measure { exact: None, value }
    }

    pub fn one() -> Self {
        Measure::exact(Rational::one())
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        self.exact.as_ref()
    }

    /// Exact value, falling back to the exact binary expansion of the `f64`.
    pub fn to_rational(&self) -> Rational {
        match &self.exact {
            Some(r) => r.clone(),
            None => rational_from_f64(self.value),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// `self / other`, exact when both sides are exact.
    pub fn ratio(&self, other: &Measure) -> Measure {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Measure::exact(a / b),
            _ => Measure::floating(self.value / other.value),
        }
    }
}

/// Converts a finite `f64` into the rational with the same binary value.
pub fn rational_from_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("finite f64")
}

/// Parses `"1/3"`, `"-2"`, `"0.25"` or `"1e-3"` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).ok()?;
        let den = BigInt::from_str(den.trim()).ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&all_digits).ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Some(if negative { -value } else { value })
}

/// Number type for function values on a tree.
pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Signed
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: ArithmeticMode;

    fn from_f64(x: f64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn from_measure(m: &Measure) -> Self;
    fn to_f64(&self) -> f64;

    fn from_i64(n: i64) -> Self {
        Self::from_f64(n as f64)
    }

    fn powu(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for f64 {
    const MODE: ArithmeticMode = ArithmeticMode::Floating;

    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_measure(m: &Measure) -> Self {
        m.value()
    }

    #[inline]
    fn to_f64(&self) -> f64 {
        *self
    }

    #[inline]
    fn powu(&self, exp: u32) -> Self {
        self.powi(exp as i32)
    }
}

impl Scalar for Rational {
    const MODE: ArithmeticMode = ArithmeticMode::Exact;

    fn from_f64(x: f64) -> Self {
        rational_from_f64(x)
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_measure(m: &Measure) -> Self {
        m.to_rational()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
}

/// Exponent of an `L_p` integrand. Integer exponents are evaluated in the
/// scalar backend, so they stay exact in rational mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Integer(u32),
    Real(f64),
}

impl Exponent {
    /// Largest integer exponent evaluated by repeated multiplication.
    const MAX_INTEGER: f64 = 16.0;

    pub fn new(p: f64) -> Self {
        if p.fract() == 0.0 && (1.0..=Self::MAX_INTEGER).contains(&p) {
            Exponent::Integer(p as u32)
        } else {
            Exponent::Real(p)
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Integer(k) => k as f64,
            Exponent::Real(p) => p,
        }
    }

    /// `(x)^(1/p)` for a nonnegative `x`.
    pub fn root(self, x: f64) -> f64 {
        match self {
            Exponent::Integer(1) => x,
            Exponent::Integer(2) => x.sqrt(),
            _ => x.powf(1.0 / self.value()),
        }
    }
}

/// Accumulator for sums of `|x|^p * weight`, exact for integer exponents.
pub(crate) enum PowerSum<S> {
    Exact(S),
    Float(f64),
}

impl<S: Scalar> PowerSum<S> {
    pub(crate) fn new(exponent: Exponent) -> Self {
        match exponent {
            Exponent::Integer(_) => PowerSum::Exact(S::zero()),
            Exponent::Real(_) => PowerSum::Float(0.0),
        }
    }

    /// Adds `|diff|^p * weight`.
    pub(crate) fn add(&mut self, diff: &S, weight: &S, exponent: Exponent) {
        match (self, exponent) {
            (PowerSum::Exact(acc), Exponent::Integer(k)) => {
                let term = diff.abs().powu(k) * weight.clone();
                *acc = std::mem::replace(acc, S::zero()) + term;
            }
            (PowerSum::Float(acc), Exponent::Real(p)) => {
                *acc += diff.abs().to_f64().powf(p) * weight.to_f64();
            }
            _ => unreachable!("accumulator built for a different exponent"),
        }
    }

    /// Mean value `sum / mass` as `f64`; the division is exact for integer
    /// exponents.
    pub(crate) fn mean(&self, mass: &S) -> f64 {
        match self {
            PowerSum::Exact(s) => (s.clone() / mass.clone()).to_f64(),
            PowerSum::Float(s) => s / mass.to_f64(),
        }
    }

    pub(crate) fn total(&self) -> f64 {
        match self {
            PowerSum::Exact(s) => s.to_f64(),
            PowerSum::Float(s) => *s,
        }
    }

    #[cfg(test)]
    pub(crate) fn exact(&self) -> Option<&S> {
        match self {
            PowerSum::Exact(s) => Some(s),
            PowerSum::Float(_) => None,
        }
    }
}
