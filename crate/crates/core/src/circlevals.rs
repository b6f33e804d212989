//! Arithmetic in the circle group ℝ/ℤ, the codomain of every pairing.
//!
//! Values come in two flavours: exact rationals (for closed-form results such
//! as `1/2` or `1 - a` with rational `a`) and floating values (for anything
//! that went through quadrature). The canonical representative always lies in
//! the half-open interval `[0, 1)`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};

/// Exact rational type used throughout the crate.
pub type Rational = Ratio<i128>;

/// Default tolerance for comparisons of floating circle values.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// A real number that stays an exact rational for as long as possible.
///
/// Arithmetic between two exact values is exact; overflow of the 128-bit
/// numerator or denominator, or any contact with a float, degrades to `Float`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Float(f64),
}

impl Scalar {
    pub const ZERO: Scalar = Scalar::Exact(Ratio::new_raw(0, 1));
    pub const ONE: Scalar = Scalar::Exact(Ratio::new_raw(1, 1));
    pub const HALF: Scalar = Scalar::Exact(Ratio::new_raw(1, 2));

    pub fn int(n: i64) -> Scalar {
        Scalar::Exact(Rational::from_integer(n as i128))
    }

    /// `p/q`; panics on `q == 0` like [`Ratio::new`].
    pub fn ratio(p: i64, q: i64) -> Scalar {
        Scalar::Exact(Rational::new(p as i128, q as i128))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Float(x) => x,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn exact(self) -> Option<Rational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => x == 0.0,
        }
    }

    pub fn is_finite(self) -> bool {
        match self {
            Scalar::Exact(_) => true,
            Scalar::Float(x) => x.is_finite(),
        }
    }

    pub fn abs(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(if r < Rational::zero() { -r } else { r }),
            Scalar::Float(x) => Scalar::Float(x.abs()),
        }
    }

    /// Integer floor, exact for rationals.
    pub fn floor(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.floor()),
            Scalar::Float(x) => Scalar::Float(x.floor()),
        }
    }

    fn combine(
        self,
        rhs: Scalar,
        exact: impl Fn(&Rational, &Rational) -> Option<Rational>,
        float: impl Fn(f64, f64) -> f64,
    ) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => match exact(&a, &b) {
                Some(r) => Scalar::Exact(r),
                None => Scalar::Float(float(self.to_f64(), rhs.to_f64())),
            },
            _ => Scalar::Float(float(self.to_f64(), rhs.to_f64())),
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::ZERO
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Float(x)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Exact(r)
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        self.combine(rhs, |a, b| a.checked_add(b), |a, b| a + b)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        self.combine(rhs, |a, b| a.checked_sub(b), |a, b| a - b)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        self.combine(rhs, |a, b| a.checked_mul(b), |a, b| a * b)
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        self.combine(
            rhs,
            |a, b| if b.is_zero() { None } else { a.checked_div(b) },
            |a, b| a / b,
        )
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::ZERO, |acc, x| acc + x)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Scalar::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(_) => s.serialize_str(&self.to_string()),
            Scalar::Float(x) => s.serialize_f64(*x),
        }
    }
}

/// Parses `p/q`, integers and plain decimals as exact rationals; anything
/// with an exponent (or `inf`/`nan`) falls back to a float.
impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Scalar> {
        let t = s.trim();
        let bad = || Error::Parse(format!("not a number: {s:?}"));
        if let Some((p, q)) = t.split_once('/') {
            let p: i128 = p.trim().parse().map_err(|_| bad())?;
            let q: i128 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(Scalar::Exact(Rational::new(p, q)));
        }
        if let Ok(n) = t.parse::<i128>() {
            return Ok(Scalar::Exact(Rational::from_integer(n)));
        }
        if let Some(r) = parse_decimal(t) {
            return Ok(Scalar::Exact(r));
        }
        t.parse::<f64>().map(Scalar::Float).map_err(|_| bad())
    }
}

fn parse_decimal(t: &str) -> Option<Rational> {
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = body.split_once('.')?;
    if frac_part.len() > 30
        || !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
        || (int_part.is_empty() && frac_part.is_empty())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: i128 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
    let denom = 10i128.checked_pow(frac_part.len() as u32)?;
    let r = Rational::new(numer, denom);
    Some(if neg { -r } else { r })
}

/// An element of ℝ/ℤ with canonical representative in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircleValue {
    representative: f64,
    exact: Option<Rational>,
}

impl CircleValue {
    pub const ZERO: CircleValue = CircleValue { representative: 0.0, exact: Some(Ratio::new_raw(0, 1)) };

    /// Reduces an exact rational; never fails.
    pub fn from_rational(r: Rational) -> CircleValue {
        let red = r - r.floor();
        CircleValue { representative: red.to_f64().unwrap_or(0.0), exact: Some(red) }
    }

    pub fn from_scalar(x: Scalar) -> Result<CircleValue> {
        match x {
            Scalar::Exact(r) => Ok(CircleValue::from_rational(r)),
            Scalar::Float(f) => reduce_mod_z(f),
        }
    }

    pub fn representative(&self) -> f64 {
        self.representative
    }

    /// `(p, q)` with `0 ≤ p < q`, `gcd(p, q) = 1` for exact values.
    pub fn exact(&self) -> Option<(i128, i128)> {
        self.exact.map(|r| (*r.numer(), *r.denom()))
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn to_scalar(&self) -> Scalar {
        match self.exact {
            Some(r) => Scalar::Exact(r),
            None => Scalar::Float(self.representative),
        }
    }
}

impl Neg for CircleValue {
    type Output = CircleValue;
    fn neg(self) -> CircleValue {
        match self.exact {
            Some(r) => CircleValue::from_rational(-r),
            None => wrap(-self.representative),
        }
    }
}

impl Add for CircleValue {
    type Output = CircleValue;
    fn add(self, rhs: CircleValue) -> CircleValue {
        circle_add(self, rhs)
    }
}

impl Sub for CircleValue {
    type Output = CircleValue;
    fn sub(self, rhs: CircleValue) -> CircleValue {
        circle_add(self, -rhs)
    }
}

impl fmt::Display for CircleValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact {
            Some(r) if r.is_zero() => write!(f, "0 (mod 1)"),
            Some(r) => write!(f, "{}/{} (mod 1)", r.numer(), r.denom()),
            None => write!(f, "{:.9}", self.representative),
        }
    }
}

impl Serialize for CircleValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn wrap(x: f64) -> CircleValue {
    let mut r = x - x.floor();
    // x slightly below an integer can round up to exactly 1.0
    if r >= 1.0 || r == 0.0 {
        r = 0.0;
    }
    CircleValue { representative: r, exact: None }
}

/// `x - floor(x)` as a floating circle value.
pub fn reduce_mod_z(x: f64) -> Result<CircleValue> {
    if !x.is_finite() {
        return domain(format!("cannot reduce non-finite value {x} mod Z"));
    }
    Ok(wrap(x))
}

/// Group operation; stays exact when both operands are exact.
pub fn circle_add(a: CircleValue, b: CircleValue) -> CircleValue {
    match (a.exact, b.exact) {
        (Some(x), Some(y)) => CircleValue::from_rational(x + y),
        _ => wrap(a.representative + b.representative),
    }
}

/// `min(|a - b|, 1 - |a - b|)`.
pub fn circular_distance(a: CircleValue, b: CircleValue) -> f64 {
    let d = match (a.exact, b.exact) {
        (Some(x), Some(y)) => {
            let diff = x - y;
            let diff = if diff < Rational::zero() { -diff } else { diff };
            diff.to_f64().unwrap_or(f64::NAN)
        }
        _ => (a.representative - b.representative).abs(),
    };
    d.min(1.0 - d)
}

/// Circular comparison. With `tol == 0` two exact values are compared exactly.
pub fn circle_eq(a: CircleValue, b: CircleValue, tol: f64) -> Result<bool> {
    if tol.is_nan() || tol < 0.0 {
        return domain(format!("comparison tolerance must be non-negative, got {tol}"));
    }
    if tol == 0.0 {
        if let (Some(x), Some(y)) = (a.exact, b.exact) {
            return Ok(x == y);
        }
    }
    Ok(circular_distance(a, b) <= tol)
}
