//! Arithmetic backends. Every DP is generic over [`Scalar`]; `f64` is the
//! fast path, [`BigRational`] is exact and used for oracle comparisons.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn from_rational(r: &BigRational) -> Self;
    fn from_i64(v: i64) -> Self;
    fn as_f64(&self) -> f64;

    /// One step of compensated summation. Exact types just add.
    fn compensated_add(sum: &mut Self, _comp: &mut Self, x: &Self) {
        *sum = sum.clone() + x.clone();
    }

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Scalar for f64 {
    fn from_rational(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    // Neumaier's variant of Kahan summation.
    fn compensated_add(sum: &mut f64, comp: &mut f64, x: &f64) {
        let t = *sum + x;
        if sum.abs() >= x.abs() {
            *comp += (*sum - t) + x;
        } else {
            *comp += (x - t) + *sum;
        }
        *sum = t;
    }
}

impl Scalar for BigRational {
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Fixed-order compensated accumulator.
#[derive(Clone, Debug)]
pub struct Acc<T: Scalar> {
    sum: T,
    comp: T,
}

impl<T: Scalar> Default for Acc<T> {
    fn default() -> Self {
        Acc { sum: T::zero(), comp: T::zero() }
    }
}

impl<T: Scalar> Acc<T> {
    pub fn new() -> Self {
        Self::default()
    }
    pub fn add(&mut self, x: &T) {
        T::compensated_add(&mut self.sum, &mut self.comp, x);
    }
    pub fn value(&self) -> T {
        self.sum.clone() + self.comp.clone()
    }
}

/// Left-to-right compensated sum.
pub fn csum<'a, T: Scalar>(xs: impl IntoIterator<Item = &'a T>) -> T {
    let mut acc = Acc::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    #[default]
    Float,
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "float" => Ok(Backend::Float),
            _ => Err(Error::Parse(format!("unknown backend `{s}` (expected exact|float)"))),
        }
    }
}

/// Parses `"3/8"`, `"-2"`, `"0.125"` or `"1e-3"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("malformed rational `{text}`"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from_integer(num * num::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num::pow(ten, (-scale) as usize))
    };
    Ok(r)
}

/// Canonical text form: `p/q`, or `p` for integers.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("0.9").unwrap(), ratio(9, 10));
        assert_eq!(parse_rational("-1.25e1").unwrap(), ratio(-25, 2));
        assert_eq!(parse_rational("3/8").unwrap(), ratio(3, 8));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut xs = vec![1.0f64];
        xs.extend(std::iter::repeat(1e-16).take(10_000));
        let naive: f64 = xs.iter().sum();
        let comp = csum(&xs);
        assert_eq!(naive, 1.0);
        assert!((comp - (1.0 + 1e-12)).abs() < 1e-15);
    }
}
