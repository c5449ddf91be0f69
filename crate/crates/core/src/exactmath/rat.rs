//! Exact rationals and their textual forms.
//!
//! `Rat` is `num_rational::BigRational`, which already keeps values in
//! lowest terms with a positive denominator.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// `num / den` as a rational. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"a/b"`, `"a"` or `"-a/b"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let bad = || Error::ParseRational(s.to_string());
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(num, den))
}

/// Always `num/den`, including integers (`3/1`), so the format is schema-stable.
pub fn to_fraction_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// The exact rational value of a finite double.
pub fn from_f64_exact(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    /// Toward minus infinity.
    Down,
    /// Toward plus infinity.
    Up,
    /// To nearest, ties away from zero.
    Nearest,
}

/// Fixed-point decimal rendering with `digits` places after the point.
/// `Down`/`Up` give outward-rounded bounds for enclosures.
pub fn to_decimal(r: &Rat, digits: usize, mode: Rounding) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = r * Rat::from_integer(scale.clone());
    let n = match mode {
        Rounding::Down => scaled.floor().to_integer(),
        Rounding::Up => scaled.ceil().to_integer(),
        Rounding::Nearest => scaled.round().to_integer(),
    };
    let neg = n.is_negative();
    let mag = n.abs();
    let (ip, fp) = mag.div_rem(&scale);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{ip}")
    } else {
        format!("{sign}{ip}.{:0>width$}", fp.to_string(), width = digits)
    }
}

/// `10^-digits` as a rational.
pub fn decimal_ulp(digits: usize) -> Rat {
    Rat::new(BigInt::one(), num_traits::pow(BigInt::from(10), digits))
}

/// Parses a plain decimal literal such as `0.6321205588` exactly.
pub fn parse_decimal(s: &str) -> Result<Rat> {
    let bad = || Error::ParseRational(s.to_string());
    let t = s.trim();
    let (neg, t) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (ip, fp) = t.split_once('.').unwrap_or((t, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    let digits: String = format!("{ip}{fp}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let v = Rat::new(num, num_traits::pow(BigInt::from(10), fp.len()));
    Ok(if neg { -v } else { v })
}

/// Number of digits after the decimal point in a literal.
pub fn decimal_places(s: &str) -> usize {
    s.trim().split_once('.').map_or(0, |(_, f)| f.len())
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}
