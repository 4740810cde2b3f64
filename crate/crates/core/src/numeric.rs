//! Exact payoff values of the form `a + b·ε`.
//!
//! `a` and `b` are arbitrary-precision rationals and `ε` is a single symbolic
//! positive infinitesimal. Values are ordered lexicographically, so `4+e`
//! (written `4⁺` in reports) is strictly above `4` and strictly below any
//! real number greater than 4.

use std::fmt;
use std::iter::Sum;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Rational = BigRational;

/// Builds a rational from a numerator and a denominator.
///
/// Panics if `den` is zero.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid value `{input}`: {reason}")]
pub struct ParseValueError {
    pub input: String,
    pub reason: &'static str,
}

/// A payoff `real + eps·ε`.
///
/// Field order matters: the derived `Ord` is lexicographic over `(real, eps)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Value {
    pub real: Rational,
    pub eps: Rational,
}

// Rationals built through `Ratio::new` and arithmetic are kept in lowest
// terms, so hashing the raw parts agrees with equality and skips the
// normalizing walk `Ratio::hash` performs.
impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.real.numer().hash(state);
        self.real.denom().hash(state);
        self.eps.numer().hash(state);
        self.eps.denom().hash(state);
    }
}

impl Value {
    pub fn new(real: Rational, eps: Rational) -> Self {
        Value { real, eps }
    }

    pub fn zero() -> Self {
        Value::default()
    }

    pub fn from_int(n: i64) -> Self {
        Value::new(int(n), Rational::zero())
    }

    pub fn from_rational(real: Rational) -> Self {
        Value::new(real, Rational::zero())
    }

    /// One unit of ε.
    pub fn epsilon() -> Self {
        Value::new(Rational::zero(), Rational::one())
    }

    /// `self + ε`, written `d⁺`.
    pub fn plus(&self) -> Self {
        Value::new(self.real.clone(), &self.eps + Rational::one())
    }

    /// `self − ε`, written `d⁻`.
    pub fn minus(&self) -> Self {
        Value::new(self.real.clone(), &self.eps - Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.real.is_zero() && self.eps.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        *self < Value::zero()
    }

    pub fn is_positive(&self) -> bool {
        *self > Value::zero()
    }

    pub fn has_eps(&self) -> bool {
        !self.eps.is_zero()
    }

    /// Multiplies both components by a rational factor.
    pub fn scale(&self, factor: &Rational) -> Self {
        Value::new(&self.real * factor, &self.eps * factor)
    }

    /// The real part with ε dropped.
    pub fn real_part(&self) -> Value {
        Value::from_rational(self.real.clone())
    }

    /// Decimal approximation of the real part.
    pub fn approx(&self) -> f64 {
        self.real.to_f64().unwrap_or(f64::NAN)
    }

    /// Report rendering: `4⁺`, `5⁻`, `8`, or `10+2ε`.
    pub fn human(&self) -> String {
        let real = fmt_rational(&self.real);
        if self.eps.is_zero() {
            real
        } else if self.eps.is_one() {
            format!("{real}⁺")
        } else if self.eps == -Rational::one() {
            format!("{real}⁻")
        } else if self.eps.is_negative() {
            format!("{real}-{}ε", fmt_rational(&-self.eps.clone()))
        } else {
            format!("{real}+{}ε", fmt_rational(&self.eps))
        }
    }
}

/// Renders a rational as `n` or `p/q`.
pub fn format_rational(r: &Rational) -> String {
    fmt_rational(r)
}

/// Parses `n`, `-n` or `p/q` into a rational.
pub fn parse_rational(text: &str) -> Result<Rational, ParseValueError> {
    parse_rational_part(text.trim(), true, text)
}

/// Serde adapter storing a rational as its `p/q` string.
pub mod rational_str {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Machine rendering, the inverse of [`FromStr`]: `4`, `20/3`, `5-e`, `-2-2e`.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_rational(&self.real))?;
        if self.eps.is_zero() {
            return Ok(());
        }
        let sign = if self.eps.is_negative() { '-' } else { '+' };
        let mag = self.eps.abs();
        if mag.is_one() {
            write!(f, "{sign}e")
        } else {
            write!(f, "{sign}{}e", fmt_rational(&mag))
        }
    }
}

fn parse_rational_part(s: &str, signed: bool, input: &str) -> Result<Rational, ParseValueError> {
    let err = |reason| ParseValueError {
        input: input.to_string(),
        reason,
    };
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) if signed => (true, rest),
        Some(_) => return Err(err("unexpected sign")),
        None => (false, s),
    };
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    let value = match body.split_once('/') {
        Some((n, d)) => {
            if !digits(n) || !digits(d) {
                return Err(err("malformed rational"));
            }
            let den: BigInt = d.parse().map_err(|_| err("malformed rational"))?;
            if den.is_zero() {
                return Err(err("zero denominator"));
            }
            let num: BigInt = n.parse().map_err(|_| err("malformed rational"))?;
            Rational::new(num, den)
        }
        None => {
            if !digits(body) {
                return Err(err("expected an integer or p/q"));
            }
            Rational::from_integer(body.parse().map_err(|_| err("malformed integer"))?)
        }
    };
    Ok(if neg { -value } else { value })
}

impl FromStr for Value {
    type Err = ParseValueError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let s = input.trim();
        // Report-style superscripts are accepted as input too.
        if let Some(base) = s.strip_suffix('⁺') {
            return Ok(base.parse::<Value>()?.plus());
        }
        if let Some(base) = s.strip_suffix('⁻') {
            return Ok(base.parse::<Value>()?.minus());
        }
        let Some(head) = s.strip_suffix('e') else {
            return Ok(Value::from_rational(parse_rational_part(s, true, input)?));
        };
        let split = head
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .last()
            .map(|(i, _)| i)
            .ok_or(ParseValueError {
                input: input.to_string(),
                reason: "ε term needs a real part and a sign",
            })?;
        let real = parse_rational_part(&head[..split], true, input)?;
        let coeff_text = &head[split + 1..];
        let coeff = if coeff_text.is_empty() {
            Rational::one()
        } else {
            parse_rational_part(coeff_text, false, input)?
        };
        let eps = if head[split..].starts_with('-') {
            -coeff
        } else {
            coeff
        };
        Ok(Value::new(real, eps))
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::from_int(n)
    }
}

impl From<Rational> for Value {
    fn from(r: Rational) -> Self {
        Value::from_rational(r)
    }
}

impl Add<&Value> for &Value {
    type Output = Value;
    fn add(self, rhs: &Value) -> Value {
        Value::new(&self.real + &rhs.real, &self.eps + &rhs.eps)
    }
}

impl Sub<&Value> for &Value {
    type Output = Value;
    fn sub(self, rhs: &Value) -> Value {
        Value::new(&self.real - &rhs.real, &self.eps - &rhs.eps)
    }
}

impl Add for Value {
    type Output = Value;
    fn add(self, rhs: Value) -> Value {
        &self + &rhs
    }
}

impl Sub for Value {
    type Output = Value;
    fn sub(self, rhs: Value) -> Value {
        &self - &rhs
    }
}

impl Add<&Value> for Value {
    type Output = Value;
    fn add(self, rhs: &Value) -> Value {
        &self + rhs
    }
}

impl Sub<&Value> for Value {
    type Output = Value;
    fn sub(self, rhs: &Value) -> Value {
        &self - rhs
    }
}

impl AddAssign<&Value> for Value {
    fn add_assign(&mut self, rhs: &Value) {
        self.real += &rhs.real;
        self.eps += &rhs.eps;
    }
}

impl SubAssign<&Value> for Value {
    fn sub_assign(&mut self, rhs: &Value) {
        self.real -= &rhs.real;
        self.eps -= &rhs.eps;
    }
}

impl Neg for Value {
    type Output = Value;
    fn neg(self) -> Value {
        Value::new(-self.real, -self.eps)
    }
}

impl Neg for &Value {
    type Output = Value;
    fn neg(self) -> Value {
        -self.clone()
    }
}

impl Sum for Value {
    fn sum<I: Iterator<Item = Value>>(iter: I) -> Value {
        iter.fold(Value::zero(), |acc, v| acc + v)
    }
}

impl<'a> Sum<&'a Value> for Value {
    fn sum<I: Iterator<Item = &'a Value>>(iter: I) -> Value {
        iter.fold(Value::zero(), |acc, v| acc + v)
    }
}
