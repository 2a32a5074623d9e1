//! Exact arithmetic.
//!
//! Edge weights are stored as [`Length`], a signed 64-bit count of
//! half-micro-units (decimal weight × 2·10⁶). Everything derived from a query
//! point is carried as [`Q`], an exact rational over the same unit, because a
//! query offset `λ·w` need not be a whole number of units.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::Error;

/// Exact rational in scaled length units.
pub type Q = crate::rat::Rat;

/// Number of [`Length`] units per unit of decimal weight.
pub const SCALE: i64 = 2_000_000;

/// Maximum number of fractional digits accepted in decimal input.
pub const MAX_FRACTION_DIGITS: usize = 6;

/// Upper bound on the total scaled weight of a network.
pub const MAX_TOTAL_WEIGHT: i64 = 1 << 60;

/// An edge weight or vertex-to-vertex distance in half-micro-units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Length(pub i64);

impl Length {
    pub const ZERO: Length = Length(0);

    pub fn raw(self) -> i64 {
        self.0
    }

    pub fn to_q(self) -> Q {
        Q::from_integer(self.0 as i128)
    }

    /// Parses a non-negative or negative decimal with at most six fractional digits.
    pub fn parse_decimal(s: &str) -> Result<Length, Error> {
        let q = parse_decimal_q(s, MAX_FRACTION_DIGITS)?;
        let scaled = q * Q::from_integer(SCALE as i128);
        debug_assert!(scaled.is_integer());
        let v = scaled.to_integer();
        if v.abs() > i64::MAX as i128 {
            return Err(Error::Overflow);
        }
        Ok(Length(v as i64))
    }

    pub fn to_decimal_string(self) -> String {
        format_scaled(&self.to_q())
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl FromStr for Length {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Length::parse_decimal(s)
    }
}

impl std::ops::Add for Length {
    type Output = Length;
    fn add(self, rhs: Length) -> Length {
        Length(self.0 + rhs.0)
    }
}

impl std::ops::Sub for Length {
    type Output = Length;
    fn sub(self, rhs: Length) -> Length {
        Length(self.0 - rhs.0)
    }
}

/// Parses a decimal literal (`"2"`, `"-0.125"`, `"3.000001"`) into an exact
/// rational. Rejects more than `max_digits` fractional digits.
pub fn parse_decimal_q(s: &str, max_digits: usize) -> Result<Q, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid decimal `{s}`"));
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return Err(bad());
    }
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let frac_trimmed = frac_part.trim_end_matches('0');
    if frac_trimmed.len() > max_digits {
        return Err(Error::WeightPrecisionExceeded(s.to_string()));
    }
    if int_part.len() > 24 {
        return Err(Error::Overflow);
    }
    let ip: i128 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| bad())? };
    let mut den: i128 = 1;
    let mut fp: i128 = 0;
    for c in frac_trimmed.chars() {
        fp = fp * 10 + (c as u8 - b'0') as i128;
        den *= 10;
    }
    let mut q = Q::new(ip * den + fp, den);
    if neg {
        q = -q;
    }
    Ok(q)
}

/// Parses either a decimal or a fraction `a/b`.
pub fn parse_rational(s: &str) -> Result<Q, Error> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: i128 = a.trim().parse().map_err(|_| Error::Parse(format!("invalid fraction `{s}`")))?;
        let b: i128 = b.trim().parse().map_err(|_| Error::Parse(format!("invalid fraction `{s}`")))?;
        if b == 0 {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        Ok(Q::new(a, b))
    } else {
        parse_decimal_q(s, 18)
    }
}

/// Formats a rational exactly: a terminating decimal when one exists with at
/// most 18 fractional digits, otherwise a reduced fraction.
pub fn format_q(q: &Q) -> String {
    if q.is_integer() {
        return q.to_integer().to_string();
    }
    let mut den = *q.denom();
    let mut twos = 0u32;
    let mut fives = 0u32;
    while den % 2 == 0 {
        den /= 2;
        twos += 1;
    }
    while den % 5 == 0 {
        den /= 5;
        fives += 1;
    }
    let digits = twos.max(fives);
    if den != 1 || digits > 18 {
        return format!("{}/{}", q.numer(), q.denom());
    }
    let pow = 10i128.pow(digits);
    let scaled = (*q * Q::from_integer(pow)).to_integer();
    let sign = if scaled < 0 { "-" } else { "" };
    let a = scaled.abs();
    let (ip, fp) = a.div_rem(&pow);
    let frac = format!("{:0width$}", fp, width = digits as usize);
    format!("{sign}{ip}.{}", frac.trim_end_matches('0'))
}

/// Formats a quantity in scaled units as a decimal weight.
pub fn format_scaled(q: &Q) -> String {
    format_q(&(q / Q::from_integer(SCALE as i128)))
}

/// Formats a fraction `a/b` in lowest terms (`0` and `1` stay bare).
pub fn format_fraction(q: &Q) -> String {
    if q.is_integer() {
        q.to_integer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn q_int(v: i64) -> Q {
    Q::from_integer(v as i128)
}

pub fn half(q: Q) -> Q {
    q / Q::from_integer(2)
}

pub fn q_min(a: Q, b: Q) -> Q {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn q_max(a: Q, b: Q) -> Q {
    if a >= b {
        a
    } else {
        b
    }
}

pub fn q_to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn is_unit_interval(q: &Q) -> bool {
    !q.is_negative() && *q <= Q::one()
}

pub fn is_zero(q: &Q) -> bool {
    q.is_zero()
}
