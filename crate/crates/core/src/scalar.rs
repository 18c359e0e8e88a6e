//! Numeric backends for grid computations.
//!
//! Every algorithm in this crate is generic over [`Scalar`], which is
//! implemented for `f64` (fast path, tolerance-based comparisons) and for
//! [`Exact`] (arbitrary-precision rationals, zero tolerance).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// Arithmetic needed by samplers, closures and checkers.
pub trait Scalar:
    Clone
    + PartialOrd
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Serialize
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    /// `true` for backends whose arithmetic is exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn from_usize(n: usize) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    /// Converts a float; exact backends take the float's exact dyadic value.
    fn from_f64(v: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;
    /// `self ^ exponent`, or `None` when the power is undefined or not
    /// representable in this backend.
    fn pow(&self, exponent: &Self) -> Option<Self>;
    /// Default comparison slack for a grid whose largest magnitude is `scale`.
    fn default_tolerance(scale: &Self) -> Self;
    /// Renders the value for CSV output.
    fn to_csv(&self) -> String;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }

    /// `Some(true)` for 1, `Some(false)` for -1, `None` otherwise.
    fn unit_sign(&self) -> Option<bool> {
        let one = Self::from_usize(1);
        if *self == one {
            Some(true)
        } else if *self == -one {
            Some(false)
        } else {
            None
        }
    }

    fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }

    fn from_usize(n: usize) -> Self {
        n as f64
    }

    fn from_rational(r: &BigRational) -> Self {
        rational_to_f64(r)
    }

    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn pow(&self, exponent: &Self) -> Option<Self> {
        let v = if exponent.fract() == 0.0 && f64::abs(*exponent) <= i32::MAX as f64 {
            self.powi(*exponent as i32)
        } else {
            self.powf(*exponent)
        };
        v.is_finite().then_some(v)
    }

    fn default_tolerance(scale: &Self) -> Self {
        1e-9 * (1.0 + f64::abs(*scale))
    }

    fn to_csv(&self) -> String {
        format_g17(*self)
    }
}

/// Converts a rational to the nearest `f64`.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        // Both parts exactly representable: one correctly rounded division.
        (Some(n), Some(d))
            if n.abs() < 9.007_199_254_740_992e15 && d < 9.007_199_254_740_992e15 =>
        {
            n / d
        }
        _ => r.to_f64().unwrap_or(f64::NAN),
    }
}

/// Formats a float with 17 significant digits, trailing zeros trimmed.
pub fn format_g17(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let s = format!("{:.*}", decimals, v);
        trim_zeros(&s)
    } else {
        let s = format!("{:.16e}", v);
        let (mantissa, exponent) = s.split_once('e').unwrap_or((&s, "0"));
        format!("{}e{}", trim_zeros(mantissa), exponent)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Exact rational number.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub BigRational);

impl Exact {
    pub fn new(numer: i64, denom: i64) -> Self {
        Exact(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn integer(n: i64) -> Self {
        Exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Exact {
    fn from(r: BigRational) -> Self {
        Exact(r)
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&self.0)
    }
}

macro_rules! exact_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Exact {
            type Output = Exact;
            fn $method(self, rhs: Exact) -> Exact {
                Exact(self.0.$method(rhs.0))
            }
        }
    };
}

exact_binop!(Add, add);
exact_binop!(Sub, sub);
exact_binop!(Mul, mul);
exact_binop!(Div, div);

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact(-self.0)
    }
}

impl Scalar for Exact {
    const EXACT: bool = true;

    fn zero() -> Self {
        Exact(BigRational::zero())
    }

    fn from_usize(n: usize) -> Self {
        Exact(BigRational::from_integer(BigInt::from(n)))
    }

    fn from_rational(r: &BigRational) -> Self {
        Exact(r.clone())
    }

    fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(Exact)
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }

    fn pow(&self, exponent: &Self) -> Option<Self> {
        if !exponent.0.is_integer() {
            return None;
        }
        let e = exponent.0.to_integer().to_i32()?;
        if e < 0 && self.0.is_zero() {
            return None;
        }
        Some(Exact(num_traits::Pow::pow(&self.0, e)))
    }

    fn default_tolerance(_scale: &Self) -> Self {
        Self::zero()
    }

    fn to_csv(&self) -> String {
        self.0.to_string()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    fn unit_sign(&self) -> Option<bool> {
        (self.0.denom().is_one() && self.0.numer().magnitude().is_one())
            .then(|| self.0.is_positive())
    }
}

/// Parses a decimal literal (`12`, `0.25`, `-3.5`, `1e-3`) or a fraction
/// (`35/3`) into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
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
    let numer: BigInt = all_digits.parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(numer);
    match scale.cmp(&0) {
        Ordering::Greater => r *= BigRational::from_integer(num_traits::pow(ten, scale as usize)),
        Ordering::Less => r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize)),
        Ordering::Equal => {}
    }
    Some(if negative { -r } else { r })
}

/// Decimal rendering when the rational terminates, else `num/den`.
pub fn rational_to_literal(r: &BigRational) -> String {
    if r.is_integer() {
        return r.to_integer().to_string();
    }
    let mut den = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let digits = twos.max(fives);
    let scaled = r * BigRational::from_integer(num_traits::pow(BigInt::from(10), digits));
    let n = scaled.to_integer();
    let negative = n.is_negative();
    let s = n.abs().to_string();
    let s = format!("{:0>width$}", s, width = digits + 1);
    let (int_part, frac_part) = s.split_at(s.len() - digits);
    format!(
        "{}{}.{}",
        if negative { "-" } else { "" },
        int_part,
        frac_part
    )
}
