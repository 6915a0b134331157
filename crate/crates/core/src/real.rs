//! Nonnegative real values that stay exact while they are rational.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// Relative slack used whenever a comparison involves a floating value.
pub const FLOAT_SLACK: f64 = 1e-12;

pub type Rational = BigRational;

/// A real number that is either an exact rational or a float approximation.
#[derive(Clone, Debug)]
pub enum Real {
    Exact(Rational),
    Approx(f64),
}

impl Real {
    pub fn zero() -> Self {
        Real::Exact(Rational::zero())
    }

    pub fn one() -> Self {
        Real::Exact(Rational::one())
    }

    pub fn int(n: i64) -> Self {
        Real::Exact(Rational::from_integer(n.into()))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Real::Exact(q) => Some(q),
            Real::Approx(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(q) => rational_to_f64(q),
            Real::Approx(x) => *x,
        }
    }

    /// Natural log, robust to rationals outside the f64 range.
    pub fn ln(&self) -> f64 {
        match self {
            Real::Exact(q) => ln_rational(q),
            Real::Approx(x) => x.ln(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Real::Exact(q) => q.is_zero(),
            Real::Approx(x) => *x == 0.0,
        }
    }

    pub fn add(&self, other: &Real) -> Real {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a + b),
            _ => Real::Approx(self.to_f64() + other.to_f64()),
        }
    }

    pub fn mul(&self, other: &Real) -> Real {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a * b),
            _ => {
                if self.is_zero() || other.is_zero() {
                    Real::zero()
                } else {
                    Real::Approx(self.to_f64() * other.to_f64())
                }
            }
        }
    }

    pub fn mul_rational(&self, q: &Rational) -> Real {
        self.mul(&Real::Exact(q.clone()))
    }

    /// Quotient; `None` on division by zero.
    pub fn div(&self, other: &Real) -> Option<Real> {
        if other.is_zero() {
            return None;
        }
        Some(match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a / b),
            _ => {
                if self.is_zero() {
                    Real::zero()
                } else {
                    Real::Approx(self.to_f64() / other.to_f64())
                }
            }
        })
    }

    pub fn max(self, other: Real) -> Real {
        if self.cmp_slack(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    /// `self^t` for `t > 0`, exact when `t` is a positive integer or when the
    /// rational root happens to be exact.
    pub fn powf(&self, t: f64) -> Real {
        if let Real::Exact(q) = self {
            if q.is_zero() {
                return Real::zero();
            }
            if t.fract() == 0.0 && t > 0.0 && t <= 64.0 {
                return Real::Exact(pow_rational(q, t as u32));
            }
        }
        if self.is_zero() {
            return Real::zero();
        }
        Real::Approx((t * self.ln()).exp())
    }

    /// `self^(1/p)` with an exact result when one exists.
    pub fn root(&self, p: u32) -> Real {
        if let Real::Exact(q) = self {
            if let Some(r) = exact_root(q, p) {
                return Real::Exact(r);
            }
        }
        if self.is_zero() {
            return Real::zero();
        }
        Real::Approx((self.ln() / p as f64).exp())
    }

    /// Total order with exact comparison between rationals and
    /// [`FLOAT_SLACK`] relative slack otherwise (values inside the slack
    /// compare equal).
    pub fn cmp_slack(&self, other: &Real) -> Ordering {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => a.cmp(b),
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                let scale = a.abs().max(b.abs());
                if (a - b).abs() <= FLOAT_SLACK * scale {
                    Ordering::Equal
                } else {
                    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
                }
            }
        }
    }

    pub fn le(&self, other: &Real) -> bool {
        self.cmp_slack(other) != Ordering::Greater
    }

    pub fn lt(&self, other: &Real) -> bool {
        self.cmp_slack(other) == Ordering::Less
    }

    pub fn approx_eq(&self, other: &Real) -> bool {
        self.cmp_slack(other) == Ordering::Equal
    }
}

impl From<Rational> for Real {
    fn from(q: Rational) -> Self {
        Real::Exact(q)
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real::Approx(x)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(q) => write!(f, "{q}"),
            Real::Approx(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Real::Exact(q) => s.serialize_str(&q.to_string()),
            Real::Approx(x) => s.serialize_f64(*x),
        }
    }
}

/// A norm value that may be infinite, as for unbounded maps.
#[derive(Clone, Debug)]
pub enum NormValue {
    Finite(Real),
    Infinite,
}

impl NormValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, NormValue::Finite(_))
    }

    pub fn finite(&self) -> Option<&Real> {
        match self {
            NormValue::Finite(r) => Some(r),
            NormValue::Infinite => None,
        }
    }

    pub fn cmp_slack(&self, other: &NormValue) -> Ordering {
        match (self, other) {
            (NormValue::Finite(a), NormValue::Finite(b)) => a.cmp_slack(b),
            (NormValue::Finite(_), NormValue::Infinite) => Ordering::Less,
            (NormValue::Infinite, NormValue::Finite(_)) => Ordering::Greater,
            (NormValue::Infinite, NormValue::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormValue::Finite(r) => write!(f, "{r}"),
            NormValue::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for NormValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NormValue::Finite(r) => r.serialize(s),
            NormValue::Infinite => s.serialize_str("inf"),
        }
    }
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    match q.to_f64() {
        Some(x) if x.is_finite() && (x != 0.0 || q.is_zero()) => x,
        _ => {
            let sign = if q.is_negative() { -1.0 } else { 1.0 };
            sign * ln_rational(&q.abs()).exp()
        }
    }
}

pub fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    top.to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln |q|`; `-inf` for zero.
pub fn ln_rational(q: &Rational) -> f64 {
    if q.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_bigint(q.numer()) - ln_bigint(q.denom())
}

pub fn pow_rational(q: &Rational, n: u32) -> Rational {
    num_traits::pow(q.clone(), n as usize)
}

/// The exact nonnegative `p`-th root of `q` if it is rational.
pub fn exact_root(q: &Rational, p: u32) -> Option<Rational> {
    if q.is_negative() || p == 0 {
        return None;
    }
    if p == 1 {
        return Some(q.clone());
    }
    let root_int = |n: &BigInt| -> Option<BigInt> {
        let r = n.nth_root(p);
        (num_traits::pow(r.clone(), p as usize) == *n).then_some(r)
    };
    let num = root_int(q.numer())?;
    let den = root_int(q.denom())?;
    Some(Rational::new(num, den))
}

/// Parse `"p/q"`, `"n"`, or a plain decimal like `"0.5"` as an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().ok()?;
        let b: BigInt = b.trim().parse().ok()?;
        if b.is_zero() {
            return None;
        }
        return Some(Rational::new(a, b));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let n: BigInt = digits.parse().ok()?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let q = Rational::new(n, den);
        return Some(if neg { -q } else { q });
    }
    let n: BigInt = s.parse().ok()?;
    Some(Rational::from_integer(n))
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// p-adic valuation of a nonzero rational.
pub fn padic_valuation(q: &Rational, p: u64) -> i64 {
    assert!(!q.is_zero(), "valuation of zero");
    let p = BigInt::from(p);
    let count = |n: &BigInt| {
        let mut n = n.clone();
        let mut v = 0i64;
        while (&n % &p).is_zero() {
            n /= &p;
            v += 1;
        }
        v
    };
    count(q.numer()) - count(q.denom())
}

pub fn sign_of(q: &Rational) -> Sign {
    if q.is_zero() {
        Sign::NoSign
    } else if q.is_negative() {
        Sign::Minus
    } else {
        Sign::Plus
    }
}

/// Serde adapter storing a rational as the string `"p/q"`.
pub mod rational_str {
    use super::{parse_rational, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let raw = serde_json::Value::deserialize(d)?;
        let text = match &raw {
            serde_json::Value::String(t) => t.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            _ => return Err(D::Error::custom("expected a rational")),
        };
        parse_rational(&text).ok_or_else(|| D::Error::custom(format!("bad rational {text:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_roots() {
        assert_eq!(exact_root(&rational(25, 1), 2), Some(rational(5, 1)));
        assert_eq!(exact_root(&rational(8, 27), 3), Some(rational(2, 3)));
        assert_eq!(exact_root(&rational(2, 1), 2), None);
    }

    #[test]
    fn slack_comparison() {
        let a = Real::Approx(1.0 + 1e-14);
        assert!(a.approx_eq(&Real::one()));
        assert!(Real::Exact(rational(1, 3)).lt(&Real::Exact(rational(1, 2))));
        assert!(Real::Approx(0.5).le(&Real::Exact(rational(1, 2))));
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rational("3/4"), Some(rational(3, 4)));
        assert_eq!(parse_rational("-0.25"), Some(rational(-1, 4)));
        assert_eq!(parse_rational("7"), Some(rational(7, 1)));
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn huge_logs() {
        let big = num_traits::pow(BigInt::from(2), 5000);
        let q = Rational::from_integer(big);
        assert!((ln_rational(&q) - 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn valuations() {
        assert_eq!(padic_valuation(&rational(12, 5), 2), 2);
        assert_eq!(padic_valuation(&rational(3, 8), 2), -3);
    }
}
