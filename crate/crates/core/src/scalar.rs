//! Scalars: exact rationals or fixed-precision reals.
//!
//! A computation picks one [`Kind`] up front and every value it produces
//! carries that kind. Binary operations between an exact and a real value
//! are rejected; conversion goes through [`Scalar::to_kind`].
//!
//! Real values are MPFR floats whose precision is derived from a decimal
//! digit count `P`; each operation is correctly rounded at that precision.
//! The precision travels with the value, so there is no ambient state.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

/// Smallest accepted real precision, in decimal digits.
pub const MIN_DIGITS: u32 = 30;
/// Default real precision, in decimal digits.
pub const DEFAULT_DIGITS: u32 = 50;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Binary precision used for `digits` decimal digits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (f64::from(digits) * LOG2_10).ceil() as u32
}

/// Inverse of [`bits_for_digits`].
pub fn digits_for_bits(bits: u32) -> u32 {
    (f64::from(bits) / LOG2_10).floor() as u32
}

/// Arithmetic kind of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Exact,
    Real { digits: u32 },
}

impl Kind {
    /// Real kind with `digits` decimal digits.
    ///
    /// Panics if `digits < MIN_DIGITS`; front ends validate user input first.
    pub fn real(digits: u32) -> Kind {
        assert!(
            digits >= MIN_DIGITS,
            "real precision must be at least {MIN_DIGITS} digits, got {digits}"
        );
        Kind::Real { digits }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Kind::Exact)
    }

    /// Decimal digits of a real kind; `None` for exact.
    pub fn digits(self) -> Option<u32> {
        match self {
            Kind::Exact => None,
            Kind::Real { digits } => Some(digits),
        }
    }

    pub fn zero(self) -> Scalar {
        self.int(0)
    }

    pub fn one(self) -> Scalar {
        self.int(1)
    }

    pub fn int(self, value: i64) -> Scalar {
        match self {
            Kind::Exact => Scalar::Exact(Rational::from(value)),
            Kind::Real { digits } => Scalar::Real(Float::with_val(bits_for_digits(digits), value)),
        }
    }

    /// `num / den` in this kind. Panics on a zero denominator.
    pub fn ratio(self, num: i64, den: i64) -> Scalar {
        assert!(den != 0, "zero denominator");
        self.rational(&Rational::from((num, den)))
    }

    pub fn integer(self, value: &Integer) -> Scalar {
        match self {
            Kind::Exact => Scalar::Exact(Rational::from(value)),
            Kind::Real { digits } => Scalar::Real(Float::with_val(bits_for_digits(digits), value)),
        }
    }

    pub fn rational(self, value: &Rational) -> Scalar {
        match self {
            Kind::Exact => Scalar::Exact(value.clone()),
            Kind::Real { digits } => Scalar::Real(Float::with_val(bits_for_digits(digits), value)),
        }
    }

    /// Parses an integer, a fraction `p/q`, or a decimal literal.
    ///
    /// In exact mode a decimal literal is converted exactly (`-0.85` is
    /// `-17/20`); in real mode everything is rounded to the working precision.
    pub fn parse(self, text: &str) -> Result<Scalar> {
        let t = text.trim();
        if t.is_empty() {
            return Err(Error::Parse("empty number".into()));
        }
        if let Some(q) = parse_rational(t) {
            return Ok(self.rational(&q));
        }
        match self {
            Kind::Exact => Err(Error::Parse(format!("not an exact number: {t:?}"))),
            Kind::Real { digits } => {
                let parsed = Float::parse(t).map_err(|e| Error::Parse(format!("{t:?}: {e}")))?;
                Ok(Scalar::Real(Float::with_val(
                    bits_for_digits(digits),
                    parsed,
                )))
            }
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Exact => f.write_str("exact"),
            Kind::Real { digits } => write!(f, "real({digits})"),
        }
    }
}

/// Parses `p`, `p/q` or a plain decimal (`-1.25`, `3e-2`) into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: Integer = n.trim().parse().ok()?;
        let d: Integer = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Rational::from((n, d)));
    }
    if let Ok(i) = t.parse::<Integer>() {
        return Some(Rational::from(i));
    }
    parse_decimal_exact(t)
}

fn parse_decimal_exact(t: &str) -> Option<Rational> {
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (negative, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
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
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from(digits.parse::<Integer>().ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from(10);
    if scale >= 0 {
        value *= ten.pow(scale as u32);
    } else {
        value /= ten.pow((-scale) as u32);
    }
    if negative {
        value = -value;
    }
    Some(value)
}

/// An exact rational or a fixed-precision real.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Real(Float),
}

impl Scalar {
    pub fn kind(&self) -> Kind {
        match self {
            Scalar::Exact(_) => Kind::Exact,
            Scalar::Real(x) => Kind::Real {
                digits: digits_for_bits(x.prec()),
            },
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Real(_) => None,
        }
    }

    pub fn as_float(&self) -> Option<&Float> {
        match self {
            Scalar::Real(x) => Some(x),
            Scalar::Exact(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.cmp0() == Ordering::Equal,
            Scalar::Real(x) => x.is_zero(),
        }
    }

    /// -1, 0 or 1. NaN reports 0.
    pub fn signum(&self) -> i32 {
        let ord = match self {
            Scalar::Exact(q) => Some(q.cmp0()),
            Scalar::Real(x) => x.cmp0(),
        };
        match ord {
            Some(Ordering::Less) => -1,
            Some(Ordering::Greater) => 1,
            _ => 0,
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Scalar::Exact(q) => *q.denom() == 1,
            Scalar::Real(x) => x.is_integer(),
        }
    }

    /// True when the value is one of 0, -1, -2, ...
    pub fn is_nonpositive_integer(&self) -> bool {
        self.is_integer() && self.signum() <= 0
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => q.to_f64(),
            Scalar::Real(x) => x.to_f64(),
        }
    }

    /// Converts to `kind`. Real to exact is rejected: the conversion would
    /// invent precision the value does not have.
    pub fn to_kind(&self, kind: Kind) -> Result<Scalar> {
        match (self, kind) {
            (Scalar::Exact(q), k) => Ok(k.rational(q)),
            (Scalar::Real(x), Kind::Real { digits }) => {
                Ok(Scalar::Real(Float::with_val(bits_for_digits(digits), x)))
            }
            (Scalar::Real(_), Kind::Exact) => Err(Error::Inexact("real value".into())),
        }
    }

    /// Real value with `digits` decimal digits.
    pub fn to_real(&self, digits: u32) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Real(Float::with_val(bits_for_digits(digits), q)),
            Scalar::Real(x) => Scalar::Real(Float::with_val(bits_for_digits(digits), x)),
        }
    }

    /// Float at `bits` precision, whatever the kind.
    pub fn to_float(&self, bits: u32) -> Float {
        match self {
            Scalar::Exact(q) => Float::with_val(bits, q),
            Scalar::Real(x) => Float::with_val(bits, x),
        }
    }

    fn mismatch(&self, other: &Scalar) -> Error {
        Error::MixedKinds(self.kind().to_string(), other.kind().to_string())
    }

    pub fn same_kind(&self, other: &Scalar) -> bool {
        self.is_exact() == other.is_exact()
    }

    pub fn try_add(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(Rational::from(a + b))),
            (Scalar::Real(a), Scalar::Real(b)) => {
                Ok(Scalar::Real(Float::with_val(a.prec().max(b.prec()), a + b)))
            }
            _ => Err(self.mismatch(rhs)),
        }
    }

    pub fn try_sub(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(Rational::from(a - b))),
            (Scalar::Real(a), Scalar::Real(b)) => {
                Ok(Scalar::Real(Float::with_val(a.prec().max(b.prec()), a - b)))
            }
            _ => Err(self.mismatch(rhs)),
        }
    }

    pub fn try_mul(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(Rational::from(a * b))),
            (Scalar::Real(a), Scalar::Real(b)) => {
                Ok(Scalar::Real(Float::with_val(a.prec().max(b.prec()), a * b)))
            }
            _ => Err(self.mismatch(rhs)),
        }
    }

    pub fn try_div(&self, rhs: &Scalar) -> Result<Scalar> {
        if !self.same_kind(rhs) {
            return Err(self.mismatch(rhs));
        }
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(Rational::from(a / b))),
            (Scalar::Real(a), Scalar::Real(b)) => {
                Ok(Scalar::Real(Float::with_val(a.prec().max(b.prec()), a / b)))
            }
            _ => unreachable!(),
        }
    }

    pub fn recip(&self) -> Result<Scalar> {
        self.kind().one().try_div(self)
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(q.clone().abs()),
            Scalar::Real(x) => Scalar::Real(x.clone().abs()),
        }
    }

    /// Integer power; `0^k` with `k < 0` is a division by zero.
    pub fn powi(&self, exponent: i64) -> Result<Scalar> {
        if exponent < 0 && self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let e = i32::try_from(exponent)
            .map_err(|_| Error::InvalidArgument(format!("exponent {exponent} too large")))?;
        Ok(match self {
            Scalar::Exact(q) => Scalar::Exact(Rational::from(q.pow(e))),
            Scalar::Real(x) => Scalar::Real(Float::with_val(x.prec(), x.pow(e))),
        })
    }

    /// `self^exponent` for a positive base (any base when the exponent is an
    /// integer). An exact base with a non-integer exponent has no exact value.
    pub fn pow(&self, exponent: &Scalar) -> Result<Scalar> {
        if exponent.is_integer() {
            let e = match exponent {
                Scalar::Exact(q) => q.numer().to_i64(),
                Scalar::Real(x) => x.to_integer().and_then(|i| i.to_i64()),
            }
            .ok_or_else(|| Error::InvalidArgument("exponent out of range".into()))?;
            if self.same_kind(exponent) {
                return self.powi(e);
            }
        }
        match (self, exponent) {
            (Scalar::Real(b), Scalar::Real(e)) => {
                if b.cmp0() != Some(Ordering::Greater) {
                    return Err(Error::InvalidArgument(
                        "non-integer power of a non-positive base".into(),
                    ));
                }
                Ok(Scalar::Real(Float::with_val(
                    b.prec().max(e.prec()),
                    b.pow(e),
                )))
            }
            (Scalar::Exact(_), Scalar::Exact(_)) => {
                Err(Error::Inexact(format!("non-integer power {exponent}")))
            }
            _ => Err(self.mismatch(exponent)),
        }
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: u32) -> String {
        let x = match self {
            Scalar::Exact(q) => Float::with_val(bits_for_digits(digits) + 8, q),
            Scalar::Real(x) => x.clone(),
        };
        format_float(&x, digits)
    }
}

/// Positional decimal for moderate exponents, scientific otherwise.
pub fn format_float(x: &Float, digits: u32) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let (negative, mantissa, exp) =
        x.to_sign_string_exp_round(10, Some(digits as usize), Round::Nearest);
    let exp = exp.unwrap_or(0);
    let mantissa = mantissa.trim_end_matches('0');
    let mantissa = if mantissa.is_empty() { "0" } else { mantissa };
    let sign = if negative { "-" } else { "" };
    // value = 0.mantissa * 10^exp
    let body = if (-20..=30).contains(&exp) {
        if exp <= 0 {
            format!("0.{}{}", "0".repeat((-exp) as usize), mantissa)
        } else if (exp as usize) >= mantissa.len() {
            format!("{}{}", mantissa, "0".repeat(exp as usize - mantissa.len()))
        } else {
            let (a, b) = mantissa.split_at(exp as usize);
            format!("{a}.{b}")
        }
    } else {
        let (first, rest) = mantissa.split_at(1);
        if rest.is_empty() {
            format!("{first}e{}", exp - 1)
        } else {
            format!("{first}.{rest}e{}", exp - 1)
        }
    };
    format!("{sign}{body}")
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{q}"),
            Scalar::Real(x) => f.write_str(&format_float(x, digits_for_bits(x.prec()))),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.partial_cmp(b),
            (Scalar::Real(a), Scalar::Real(b)) => a.partial_cmp(b),
            _ => None,
        }
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar::Exact(q)
    }
}

// Operator sugar for code that has already established a common kind.
// Mixing kinds through these operators is a bug and panics.
macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);
binop!(Div, div, try_div);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(Rational::from(-q)),
            Scalar::Real(x) => Scalar::Real(Float::with_val(x.prec(), -x)),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}
