//! Exponents in `(0, ∞]` carried by their reciprocals.
//!
//! Every exponent law the factorization pipelines use is additive in
//! reciprocals (`1/s = Σ 1/s_k − (m+1)/2` and friends), so an exponent is
//! stored as `1/p`. When all inputs are rational the arithmetic stays in
//! `Rational64` and exponent equality is exact; a single floating-point
//! input moves the whole computation to `f64`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Sub};

use num_rational::Rational64;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// The reciprocal `1/p` of an exponent. Zero encodes `p = ∞`.
#[derive(Debug, Clone, Copy)]
pub enum Recip {
    Exact(Rational64),
    Float(f64),
}

impl Recip {
    pub fn zero() -> Self {
        Recip::Exact(Rational64::from_integer(0))
    }

    pub fn int(k: i64) -> Self {
        Recip::Exact(Rational64::from_integer(k))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Recip::Exact(Rational64::new(num, den))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Recip::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            Recip::Float(x) => x,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Recip::Exact(_))
    }

    pub fn is_positive(self) -> bool {
        match self {
            Recip::Exact(r) => r > Rational64::from_integer(0),
            Recip::Float(x) => x > 0.0,
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Recip::Exact(r) => r == Rational64::from_integer(0),
            Recip::Float(x) => x == 0.0,
        }
    }

    /// Multiplies by a small integer.
    pub fn scale(self, k: i64) -> Self {
        match self {
            Recip::Exact(r) => Recip::Exact(r * k),
            Recip::Float(x) => Recip::Float(x * k as f64),
        }
    }

    /// The exponent whose reciprocal this is.
    pub fn exponent(self) -> Exponent {
        Exponent(self)
    }
}

impl Add for Recip {
    type Output = Recip;
    fn add(self, rhs: Recip) -> Recip {
        match (self, rhs) {
            (Recip::Exact(a), Recip::Exact(b)) => Recip::Exact(a + b),
            (a, b) => Recip::Float(a.to_f64() + b.to_f64()),
        }
    }
}

impl Sub for Recip {
    type Output = Recip;
    fn sub(self, rhs: Recip) -> Recip {
        match (self, rhs) {
            (Recip::Exact(a), Recip::Exact(b)) => Recip::Exact(a - b),
            (a, b) => Recip::Float(a.to_f64() - b.to_f64()),
        }
    }
}

impl PartialEq for Recip {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Recip::Exact(a), Recip::Exact(b)) => a == b,
            (a, b) => a.to_f64() == b.to_f64(),
        }
    }
}

impl PartialOrd for Recip {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Recip::Exact(a), Recip::Exact(b)) => Some(a.cmp(b)),
            (a, b) => a.to_f64().partial_cmp(&b.to_f64()),
        }
    }
}

impl std::iter::Sum for Recip {
    fn sum<I: Iterator<Item = Recip>>(iter: I) -> Recip {
        iter.fold(Recip::zero(), |acc, r| acc + r)
    }
}

/// An exponent `p ∈ (0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(Recip);

impl Exponent {
    pub const INFINITY: Exponent = Exponent(Recip::Float(0.0));

    pub fn int(k: i64) -> Self {
        assert!(k > 0, "exponent must be positive");
        Exponent(Recip::ratio(1, k))
    }

    /// The exponent `num/den`.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(num > 0 && den > 0, "exponent must be positive");
        Exponent(Recip::ratio(den, num))
    }

    pub fn float(p: f64) -> Self {
        assert!(p > 0.0, "exponent must be positive");
        if p.is_infinite() {
            Exponent(Recip::zero())
        } else {
            Exponent(Recip::Float(1.0 / p))
        }
    }

    pub fn recip(self) -> Recip {
        self.0
    }

    pub fn value(self) -> f64 {
        let r = self.0.to_f64();
        if r == 0.0 {
            f64::INFINITY
        } else {
            1.0 / r
        }
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_zero()
    }

    pub fn is_exact(self) -> bool {
        self.0.is_exact()
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        // larger exponent <=> smaller reciprocal
        other.0.partial_cmp(&self.0)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            r if r.is_zero() => write!(f, "inf"),
            Recip::Exact(r) => {
                if *r.numer() == 1 {
                    write!(f, "{}", r.denom())
                } else {
                    write!(f, "{}/{}", r.denom(), r.numer())
                }
            }
            Recip::Float(x) => write!(f, "{}", 1.0 / x),
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Ok(Exponent(Recip::zero()));
        }
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| format!("bad exponent `{s}`"))?;
            let d: i64 = d.trim().parse().map_err(|_| format!("bad exponent `{s}`"))?;
            if n <= 0 || d <= 0 {
                return Err(format!("exponent `{s}` must be positive"));
            }
            return Ok(Exponent::ratio(n, d));
        }
        if let Ok(k) = s.parse::<i64>() {
            if k <= 0 {
                return Err(format!("exponent `{s}` must be positive"));
            }
            return Ok(Exponent::int(k));
        }
        let x: f64 = s.parse().map_err(|_| format!("bad exponent `{s}`"))?;
        if !(x > 0.0) {
            return Err(format!("exponent `{s}` must be positive"));
        }
        Ok(Exponent::float(x))
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Recip::Exact(r) if !self.is_infinite() && *r.numer() == 1 => serializer.serialize_i64(*r.denom()),
            Recip::Float(_) if !self.is_infinite() => serializer.serialize_f64(self.value()),
            _ => serializer.serialize_str(&self.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ExpVisitor;

        impl Visitor<'_> for ExpVisitor {
            type Value = Exponent;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a positive number, a fraction string like \"1/2\", or \"inf\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Exponent, E> {
                if v <= 0 {
                    return Err(E::custom("exponent must be positive"));
                }
                Ok(Exponent::int(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Exponent, E> {
                self.visit_i64(v as i64)
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Exponent, E> {
                if !(v > 0.0) {
                    return Err(E::custom("exponent must be positive"));
                }
                if v.fract() == 0.0 && v < 1e15 {
                    return Ok(Exponent::int(v as i64));
                }
                Ok(Exponent::float(v))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Exponent, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(ExpVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_arithmetic_stays_exact() {
        let half = Exponent::ratio(1, 2);
        let third = Exponent::ratio(1, 3);
        let sum = half.recip() + third.recip();
        assert!(sum.is_exact());
        assert_eq!(sum, Recip::int(5));
        assert_eq!(sum.exponent(), Exponent::ratio(1, 5));
    }

    #[test]
    fn float_input_falls_back() {
        let sum = Exponent::float(0.3).recip() + Exponent::int(1).recip();
        assert!(!sum.is_exact());
        assert!((sum.to_f64() - (1.0 / 0.3 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn ordering_follows_exponent_not_reciprocal() {
        assert!(Exponent::int(2) > Exponent::int(1));
        assert!(Exponent::INFINITY > Exponent::int(7));
        assert!(Exponent::ratio(1, 3) < Exponent::ratio(1, 2));
    }

    #[test]
    fn parse_and_serde() {
        let e: Exponent = "2/3".parse().unwrap();
        assert_eq!(e, Exponent::ratio(2, 3));
        assert_eq!(serde_json::to_string(&e).unwrap(), "\"2/3\"");
        assert_eq!(serde_json::to_string(&Exponent::ratio(1, 2)).unwrap(), "\"1/2\"");
        assert_eq!(serde_json::to_string(&Exponent::int(2)).unwrap(), "2");
        assert_eq!(serde_json::to_string(&Exponent::INFINITY).unwrap(), "\"inf\"");
        let back: Exponent = serde_json::from_str("\"1/3\"").unwrap();
        assert_eq!(back, Exponent::ratio(1, 3));
        let back: Exponent = serde_json::from_str("1").unwrap();
        assert!(back.is_exact());
        let back: Exponent = serde_json::from_str("0.75").unwrap();
        assert!((back.value() - 0.75).abs() < 1e-15);
        assert!(serde_json::from_str::<Exponent>("-1").is_err());
    }
}
