//! Weight arithmetic shared by every module.
//!
//! Two numeric modes are supported: exact rationals backed by arbitrary
//! precision integers, and IEEE binary64 floats. Graph structure and most
//! transforms are generic over [`Scalar`]; the spectral solvers are float only.

use std::fmt::{self, Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational weight.
pub type Rational = BigRational;

/// Numeric type usable as node/edge weight and centrality value.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Zero
    + One
    + Signed
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + 'static
{
    /// True when arithmetic on this type is exact.
    const EXACT: bool;

    fn to_f64(&self) -> f64;

    /// Exact conversion for rationals (every finite float is dyadic);
    /// `None` for non-finite input.
    fn from_f64(x: f64) -> Option<Self>;

    fn from_rational(r: &Rational) -> Self;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    /// Equality used by structural predicates such as out-regularity:
    /// exact for rationals, `|a - b| <= rel * max(1, |a|, |b|)` for floats.
    fn near(&self, other: &Self, rel: f64) -> bool;

    /// Canonical text: lowest-terms `p/q` (or `p`) for rationals, shortest
    /// round-trip decimal for floats.
    fn to_text(&self) -> String;

    fn is_finite_value(&self) -> bool {
        true
    }

    /// Strictly above zero (`Signed::is_positive` accepts `+0.0` for floats).
    fn gt_zero(&self) -> bool {
        *self > Self::zero()
    }

    fn lt_zero(&self) -> bool {
        *self < Self::zero()
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn near(&self, other: &Self, rel: f64) -> bool {
        let scale = 1f64.max(self.abs()).max(other.abs());
        (self - other).abs() <= rel * scale
    }

    fn to_text(&self) -> String {
        format!("{self:?}")
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn near(&self, other: &Self, _rel: f64) -> bool {
        self == other
    }

    fn to_text(&self) -> String {
        format_rational(self)
    }
}

fn rational_to_f64(r: &Rational) -> f64 {
    if let Some(x) = ToPrimitive::to_f64(r) {
        if x.is_finite() {
            return x;
        }
    }
    // Very large numerators/denominators: shift both down first.
    let n_bits = r.numer().bits() as i64;
    let d_bits = r.denom().bits() as i64;
    let shift_n = (n_bits - 900).max(0) as usize;
    let shift_d = (d_bits - 900).max(0) as usize;
    let n = (r.numer() >> shift_n).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift_d).to_f64().unwrap_or(f64::NAN);
    n / d * 2f64.powi((shift_n as i64 - shift_d as i64) as i32)
}

/// Lowest-terms rendering, `p/q`, or `p` when the denominator is 1.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseNumberError(pub String);

impl Display for ParseNumberError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid number `{}`", self.0)
    }
}

impl std::error::Error for ParseNumberError {}

/// Parses `p/q`, an integer, or a decimal with optional exponent
/// (`0.2`, `-1.5e-3`) into an exact rational. Decimals are read exactly,
/// so `0.2` is `1/5` and not the nearest binary float.
pub fn parse_rational(text: &str) -> Result<Rational, ParseNumberError> {
    let err = || ParseNumberError(text.to_string());
    let text = text.trim();
    if text.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = text.split_once('/') {
        let p = parse_decimal(p).ok_or_else(err)?;
        let q = parse_decimal(q).ok_or_else(err)?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(p / q);
    }
    parse_decimal(text).ok_or_else(err)
}

fn parse_decimal(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], i64::from_str(&text[i + 1..]).ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    if exponent.abs() > 10_000 {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// Least common multiple of the denominators of `values` (each in lowest terms).
pub fn lcm_of_denominators<'a, I>(values: I) -> BigInt
where
    I: IntoIterator<Item = &'a Rational>,
{
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// Formats a float with `digits` significant digits, for human summaries.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let formatted = format!("{:.*e}", digits.saturating_sub(1), x);
    let value: f64 = formatted.parse().unwrap_or(x);
    format!("{value}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::from_ratio(p, d)
    }

    #[test]
    fn parses_fractions_and_decimals_exactly() {
        assert_eq!(parse_rational("1/5").unwrap(), q(1, 5));
        assert_eq!(parse_rational("0.2").unwrap(), q(1, 5));
        assert_eq!(parse_rational("2").unwrap(), q(2, 1));
        assert_eq!(parse_rational("-1.5e-3").unwrap(), q(-3, 2000));
        assert_eq!(parse_rational("4/6").unwrap(), q(2, 3));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert_eq!(parse_rational("3E2").unwrap(), q(300, 1));
    }

    #[test]
    fn rejects_malformed_numbers() {
        for bad in ["", "abc", "1/0", "1//2", "1.2.3", "e5", "--1", "0x10", "1/"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn rational_text_is_lowest_terms() {
        assert_eq!(q(4, 26).to_text(), "2/13");
        assert_eq!(q(6, 3).to_text(), "2");
        assert_eq!(q(-1, 3).to_text(), "-1/3");
    }

    #[test]
    fn float_near_uses_relative_scale() {
        assert!(1.0f64.near(&(1.0 + 1e-12), 1e-9));
        assert!(!1.0f64.near(&1.001, 1e-9));
        assert!(1e6f64.near(&(1e6 + 1e-4), 1e-9));
    }

    #[test]
    fn lcm_of_thirteenths_and_halves() {
        let vals = [q(2, 13), q(1, 2), q(3, 26)];
        assert_eq!(lcm_of_denominators(vals.iter()), BigInt::from(26));
    }

    #[test]
    fn huge_rationals_convert_to_float() {
        let big = BigInt::from(3) * num_traits::pow(BigInt::from(2), 3000);
        let r = BigRational::new(big.clone(), big * BigInt::from(4));
        assert_eq!(Scalar::to_f64(&r), 0.25);
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_significant(2.0 / 13.0, 6), "0.153846");
        assert_eq!(format_significant(1234567.0, 3), "1230000");
        assert_eq!(format_significant(0.0, 6), "0");
    }
}
