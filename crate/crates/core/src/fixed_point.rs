//! 1e18-scaled fixed-point decimal.
//!
//! Every protocol-side quantity (rates, balances, indices) is a [`FixedDec`]:
//! an `i128` mantissa whose value is `mantissa / 10^18`. Products and
//! quotients go through a 256-bit intermediate and are floored toward
//! negative infinity, the same integer-division convention lending contracts
//! use on chain. Overflow is always reported, never wrapped.
//!
//! The econometrics side works in `f64`; [`FixedDec::to_f64`] is the only
//! projection and is accurate to within one ulp of the exact value.

use std::fmt;
use std::str::FromStr;

use ethnum::I256;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Number of fractional decimal digits carried by the mantissa.
pub const DECIMALS: u32 = 18;
/// `10^18`, the mantissa of one.
pub const SCALE: i128 = 1_000_000_000_000_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FixedError {
    #[error("fixed-point overflow")]
    Overflow,
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid decimal literal {0:?}")]
    Parse(String),
    #[error("value {0} is not representable as a fixed-point decimal")]
    NotRepresentable(String),
}

#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FixedDec(i128);

impl FixedDec {
    pub const ZERO: FixedDec = FixedDec(0);
    pub const ONE: FixedDec = FixedDec(SCALE);
    pub const MAX: FixedDec = FixedDec(i128::MAX);

    pub const fn from_mantissa(mantissa: i128) -> Self {
        FixedDec(mantissa)
    }

    pub const fn mantissa(self) -> i128 {
        self.0
    }

    /// `n` as a decimal; `i64::MAX * 10^18` still fits in 128 bits.
    pub const fn from_int(n: i64) -> Self {
        FixedDec(n as i128 * SCALE)
    }

    /// `num / den`, floored.
    pub fn from_ratio(num: i64, den: i64) -> Result<Self, FixedError> {
        FixedDec::from_int(num).checked_div(FixedDec::from_int(den))
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    pub fn checked_add(self, rhs: FixedDec) -> Result<FixedDec, FixedError> {
        self.0
            .checked_add(rhs.0)
            .map(FixedDec)
            .ok_or(FixedError::Overflow)
    }

    pub fn checked_sub(self, rhs: FixedDec) -> Result<FixedDec, FixedError> {
        self.0
            .checked_sub(rhs.0)
            .map(FixedDec)
            .ok_or(FixedError::Overflow)
    }

    /// `self - rhs`, clamped at zero.
    pub fn saturating_sub_zero(self, rhs: FixedDec) -> FixedDec {
        FixedDec(self.0.saturating_sub(rhs.0).max(0))
    }

    /// Floor of `self * rhs`.
    pub fn checked_mul(self, rhs: FixedDec) -> Result<FixedDec, FixedError> {
        let wide = I256::from(self.0) * I256::from(rhs.0);
        narrow(floor_div(wide, I256::from(SCALE)))
    }

    /// `sum(a_i * b_i)` with a single floor at the end.
    pub fn mul_sum(terms: &[(FixedDec, FixedDec)]) -> Result<FixedDec, FixedError> {
        let mut acc = I256::ZERO;
        for &(a, b) in terms {
            acc = acc
                .checked_add(I256::from(a.0) * I256::from(b.0))
                .ok_or(FixedError::Overflow)?;
        }
        narrow(floor_div(acc, I256::from(SCALE)))
    }

    /// Floor of `self / rhs`.
    pub fn checked_div(self, rhs: FixedDec) -> Result<FixedDec, FixedError> {
        if rhs.0 == 0 {
            return Err(FixedError::DivisionByZero);
        }
        let wide = I256::from(self.0) * I256::from(SCALE);
        narrow(floor_div(wide, I256::from(rhs.0)))
    }

    /// Multiplication by a plain integer; exact.
    pub fn mul_int(self, n: i128) -> Result<FixedDec, FixedError> {
        self.0.checked_mul(n).map(FixedDec).ok_or(FixedError::Overflow)
    }

    /// Floor of `self / n` for a plain integer `n`.
    pub fn div_int(self, n: i128) -> Result<FixedDec, FixedError> {
        if n == 0 {
            return Err(FixedError::DivisionByZero);
        }
        narrow(floor_div(I256::from(self.0), I256::from(n)))
    }

    /// `self^n` by repeated squaring; each step floors like [`FixedDec::checked_mul`].
    pub fn pow_u(self, mut n: u32) -> Result<FixedDec, FixedError> {
        let mut acc = FixedDec::ONE;
        let mut base = self;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.checked_mul(base)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.checked_mul(base)?;
            }
        }
        Ok(acc)
    }

    pub fn min(self, other: FixedDec) -> FixedDec {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: FixedDec) -> FixedDec {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Nearest `f64`. `10^18` is exact in binary64, so the result carries at
    /// most the rounding of the mantissa conversion plus one correctly
    /// rounded division: within one ulp.
    pub fn to_f64(self) -> f64 {
        self.0 as f64 / SCALE as f64
    }

    /// Floor of `x * 10^18`. Not exact for values that are not dyadic; used
    /// only at the agent-decision boundary of the simulator.
    pub fn from_f64(x: f64) -> Result<FixedDec, FixedError> {
        if !x.is_finite() {
            return Err(FixedError::NotRepresentable(x.to_string()));
        }
        let scaled = (x * SCALE as f64).floor();
        if scaled >= i128::MAX as f64 || scaled <= i128::MIN as f64 {
            return Err(FixedError::NotRepresentable(x.to_string()));
        }
        Ok(FixedDec(scaled as i128))
    }
}

fn floor_div(num: I256, den: I256) -> I256 {
    let q = num / den;
    let r = num % den;
    if r != I256::ZERO && ((r < I256::ZERO) != (den < I256::ZERO)) {
        q - I256::ONE
    } else {
        q
    }
}

fn narrow(x: I256) -> Result<FixedDec, FixedError> {
    i128::try_from(x)
        .map(FixedDec)
        .map_err(|_| FixedError::Overflow)
}

impl fmt::Display for FixedDec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let abs = self.0.unsigned_abs();
        let scale = SCALE as u128;
        let sign = if self.0 < 0 { "-" } else { "" };
        write!(f, "{sign}{}.{:018}", abs / scale, abs % scale)
    }
}

impl fmt::Debug for FixedDec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FixedDec({self})")
    }
}

impl FromStr for FixedDec {
    type Err = FixedError;

    /// Accepts `[-]digits[.digits]` with at most 18 fractional digits.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FixedError::Parse(s.to_string());
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty()
            || !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
            || frac_part.len() > DECIMALS as usize
            || (body.contains('.') && frac_part.is_empty())
        {
            return Err(bad());
        }
        let int: i128 = int_part.parse().map_err(|_| bad())?;
        let mut frac: i128 = if frac_part.is_empty() {
            0
        } else {
            frac_part.parse().map_err(|_| bad())?
        };
        frac *= 10_i128.pow(DECIMALS - frac_part.len() as u32);
        let magnitude = int
            .checked_mul(SCALE)
            .and_then(|m| m.checked_add(frac))
            .ok_or(FixedError::Overflow)?;
        Ok(FixedDec(if negative { -magnitude } else { magnitude }))
    }
}

impl Serialize for FixedDec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FixedDec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter that writes a [`FixedDec`] as its raw mantissa in a string,
/// e.g. `"900000000000000000"` for 0.9. Used by rate-model parameter files.
pub mod mantissa_str {
    use super::FixedDec;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &FixedDec, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&v.mantissa())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<FixedDec, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse(&s).map_err(serde::de::Error::custom)
    }

    /// Accepts plain integers and the `9e17` shorthand used in parameter tables.
    pub fn parse(s: &str) -> Result<FixedDec, String> {
        let s = s.trim();
        if let Some((m, e)) = s.split_once(['e', 'E']) {
            let m: i128 = m.parse().map_err(|_| format!("bad mantissa {s:?}"))?;
            let e: u32 = e.parse().map_err(|_| format!("bad exponent {s:?}"))?;
            return 10_i128
                .checked_pow(e)
                .and_then(|p| p.checked_mul(m))
                .map(FixedDec::from_mantissa)
                .ok_or_else(|| format!("mantissa {s:?} overflows"));
        }
        s.parse::<i128>()
            .map(FixedDec::from_mantissa)
            .map_err(|_| format!("bad mantissa {s:?}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(x: i128) -> FixedDec {
        FixedDec::from_mantissa(x)
    }

    #[test]
    fn mul_examples() {
        let x = m(123_456_789);
        assert_eq!(FixedDec::ONE.checked_mul(x).unwrap(), x);
        assert_eq!(FixedDec::ZERO.checked_mul(x).unwrap(), FixedDec::ZERO);
        assert_eq!(m(9 * 10_i128.pow(17)).checked_mul(m(264_248_265)).unwrap(), m(237_823_438));
    }

    #[test]
    fn mul_sum_floors_once() {
        let third = FixedDec::from_ratio(1, 3).unwrap();
        let two = FixedDec::from_int(2);
        // two separate floors lose a unit that the fused form keeps
        let sep = third.checked_mul(third).unwrap().checked_add(third.checked_mul(third).unwrap()).unwrap();
        let fused = FixedDec::mul_sum(&[(third, third), (third, third)]).unwrap();
        assert_eq!(fused.mantissa() - sep.mantissa(), 1);
        assert_eq!(FixedDec::mul_sum(&[(two, third)]).unwrap(), two.checked_mul(third).unwrap());
        assert_eq!(FixedDec::mul_sum(&[]).unwrap(), FixedDec::ZERO);
    }

    #[test]
    fn mul_floors_toward_negative_infinity() {
        // -0.5e-18 floors to -1e-18
        assert_eq!(m(-1).checked_mul(m(SCALE / 2)).unwrap(), m(-1));
        assert_eq!(m(1).checked_mul(m(SCALE / 2)).unwrap(), m(0));
    }

    #[test]
    fn mul_overflow_is_error() {
        assert_eq!(FixedDec::MAX.checked_mul(FixedDec::from_int(2)), Err(FixedError::Overflow));
        assert_eq!(FixedDec::MAX.checked_add(m(1)), Err(FixedError::Overflow));
    }

    #[test]
    fn div_examples() {
        let x = m(987_654_321_000);
        assert_eq!(x.checked_div(FixedDec::ONE).unwrap(), x);
        assert_eq!(FixedDec::ZERO.checked_div(x).unwrap(), FixedDec::ZERO);
        assert_eq!(
            FixedDec::ONE.checked_div(FixedDec::from_int(3)).unwrap(),
            m(333_333_333_333_333_333)
        );
        assert_eq!(x.checked_div(FixedDec::ZERO), Err(FixedError::DivisionByZero));
        assert_eq!(FixedDec::from_int(-1).checked_div(FixedDec::from_int(3)).unwrap(), m(-333_333_333_333_333_334));
    }

    #[test]
    fn pow_examples() {
        let half = m(SCALE / 2);
        assert_eq!(half.pow_u(0).unwrap(), FixedDec::ONE);
        assert_eq!(FixedDec::ONE.pow_u(64).unwrap(), FixedDec::ONE);
        assert_eq!(half.pow_u(32).unwrap(), m(232_830_643));
        assert_eq!(FixedDec::ZERO.pow_u(0).unwrap(), FixedDec::ONE);
    }

    #[test]
    fn display_has_eighteen_digits() {
        assert_eq!(FixedDec::ONE.to_string(), "1.000000000000000000");
        assert_eq!(m(-1).to_string(), "-0.000000000000000001");
        assert_eq!(m(9 * 10_i128.pow(17)).to_string(), "0.900000000000000000");
    }

    #[test]
    fn parse_rejects_junk() {
        for bad in ["", ".5", "1.", "1.2.3", "abc", "1.0000000000000000001", "--1", "+1"] {
            assert!(bad.parse::<FixedDec>().is_err(), "{bad:?}");
        }
        assert_eq!("0.9".parse::<FixedDec>().unwrap(), m(9 * 10_i128.pow(17)));
        assert_eq!("-2".parse::<FixedDec>().unwrap(), FixedDec::from_int(-2));
    }

    #[test]
    fn mantissa_shorthand() {
        assert_eq!(mantissa_str::parse("9e17").unwrap(), m(9 * 10_i128.pow(17)));
        assert_eq!(mantissa_str::parse("264248265").unwrap(), m(264_248_265));
        assert!(mantissa_str::parse("0.5").is_err());
    }

    #[test]
    fn to_f64_projection() {
        assert_eq!(m(SCALE / 4).to_f64(), 0.25);
        assert_eq!(FixedDec::from_f64(0.25).unwrap(), m(SCALE / 4));
        assert!(FixedDec::from_f64(f64::NAN).is_err());
    }
}
