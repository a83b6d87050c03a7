//! Exact scalars with p-adic valuations.
//!
//! Everything here is exact: rationals are arbitrary precision (or checked
//! small ratios), valuations are extended integers, and "p-power values" carry
//! a rational exponent so half-integral powers such as `δ^{1/2}` never need a
//! square root.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational exponent of a p-power (`p^e` with `e` possibly half-integral).
pub type Exponent = Ratio<i64>;

/// `v_p` of a scalar: an integer, or `+∞` for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn is_finite(self) -> bool {
        matches!(self, Valuation::Finite(_))
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinity,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => write!(f, "+inf"),
        }
    }
}

/// Scalars that carry a p-adic valuation.
pub trait PAdicValued {
    fn vp(&self, p: u64) -> Valuation;

    fn is_p_unit(&self, p: u64) -> bool {
        self.vp(p) == Valuation::Finite(0)
    }

    fn is_p_integral(&self, p: u64) -> bool {
        self.vp(p) >= Valuation::Finite(0)
    }
}

fn vp_bigint(x: &BigInt, p: u64) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinity;
    }
    let p = BigInt::from(p);
    let mut x = x.clone();
    let mut k = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return Valuation::Finite(k);
        }
        x = q;
        k += 1;
    }
}

macro_rules! impl_vp_machine_int {
    ($($t:ty),*) => {$(
        impl PAdicValued for $t {
            fn vp(&self, p: u64) -> Valuation {
                if *self == 0 {
                    return Valuation::Infinity;
                }
                let p = p as i128;
                let mut x = *self as i128;
                let mut k = 0;
                while x % p == 0 {
                    x /= p;
                    k += 1;
                }
                Valuation::Finite(k)
            }
        }

        impl PAdicValued for Ratio<$t> {
            fn vp(&self, p: u64) -> Valuation {
                if self.numer().is_zero() {
                    return Valuation::Infinity;
                }
                let n = self.numer().vp(p).finite().unwrap_or(0);
                let d = self.denom().vp(p).finite().unwrap_or(0);
                Valuation::Finite(n - d)
            }
        }
    )*};
}

impl_vp_machine_int!(i64, i128);

impl PAdicValued for BigInt {
    fn vp(&self, p: u64) -> Valuation {
        vp_bigint(self, p)
    }
}

impl PAdicValued for BigRational {
    fn vp(&self, p: u64) -> Valuation {
        if self.numer().is_zero() {
            return Valuation::Infinity;
        }
        let n = vp_bigint(self.numer(), p).finite().unwrap_or(0);
        let d = vp_bigint(self.denom(), p).finite().unwrap_or(0);
        Valuation::Finite(n - d)
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// An exact rational paired with the prime it is valued at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PAdicScalar {
    value: BigRational,
    prime: u64,
}

impl PAdicScalar {
    pub fn new(value: BigRational, prime: u64) -> Result<Self> {
        check_prime(prime)?;
        Ok(Self { value, prime })
    }

    pub fn from_ratio(numer: i64, denom: i64, prime: u64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::Parse("zero denominator".into()));
        }
        Self::new(
            BigRational::new(BigInt::from(numer), BigInt::from(denom)),
            prime,
        )
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn vp(&self) -> Valuation {
        self.value.vp(self.prime)
    }

    pub fn is_unit(&self) -> bool {
        self.vp() == Valuation::Finite(0)
    }

    /// Valuation normalized for a residue extension of inertia degree `f`.
    pub fn scaled_vp(&self, f: u32) -> Valuation {
        match self.vp() {
            Valuation::Finite(v) => Valuation::Finite(v * f as i64),
            Valuation::Infinity => Valuation::Infinity,
        }
    }
}

/// A value known only up to a unit: `p^exponent · (unit)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PPowerValue {
    #[serde(with = "exponent_str")]
    pub exponent: Exponent,
    /// Opaque unit-part tags, kept sorted so products commute.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unit_labels: Vec<String>,
}

impl PPowerValue {
    pub fn new(exponent: Exponent) -> Self {
        Self {
            exponent,
            unit_labels: Vec::new(),
        }
    }

    pub fn with_label(exponent: Exponent, label: impl Into<String>) -> Self {
        Self {
            exponent,
            unit_labels: vec![label.into()],
        }
    }

    pub fn one() -> Self {
        Self::new(Exponent::zero())
    }

    pub fn is_unit(&self) -> bool {
        self.exponent.is_zero()
    }

    pub fn pow(&self, k: i64) -> Self {
        let mut labels = Vec::new();
        if k > 0 {
            for _ in 0..k {
                labels.extend(self.unit_labels.iter().cloned());
            }
            labels.sort();
        }
        Self {
            exponent: self.exponent * k,
            unit_labels: labels,
        }
    }
}

impl Mul for PPowerValue {
    type Output = PPowerValue;

    // p^a · p^b = p^{a+b}
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: PPowerValue) -> PPowerValue {
        let mut unit_labels = self.unit_labels;
        unit_labels.extend(rhs.unit_labels);
        unit_labels.sort();
        PPowerValue {
            exponent: self.exponent + rhs.exponent,
            unit_labels,
        }
    }
}

impl fmt::Display for PPowerValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p^({})", self.exponent)?;
        for l in &self.unit_labels {
            write!(f, "·{l}")?;
        }
        Ok(())
    }
}

/// Exponents in JSON/TOML: written as strings, read from strings or integers.
#[derive(Deserialize)]
#[serde(untagged)]
enum ExponentRepr {
    Int(i64),
    Str(String),
}

impl ExponentRepr {
    fn into_exponent(self) -> Result<Exponent> {
        match self {
            ExponentRepr::Int(k) => Ok(Exponent::from_integer(k)),
            ExponentRepr::Str(s) => parse_exponent(&s),
        }
    }
}

pub mod exponent_str {
    use super::{Exponent, ExponentRepr};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(e: &Exponent, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_exponent(e))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Exponent, D::Error> {
        ExponentRepr::deserialize(d)?
            .into_exponent()
            .map_err(serde::de::Error::custom)
    }
}

pub mod exponent_list {
    use super::{Exponent, ExponentRepr};
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Exponent], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for e in v {
            seq.serialize_element(&super::format_exponent(e))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Exponent>, D::Error> {
        Vec::<ExponentRepr>::deserialize(d)?
            .into_iter()
            .map(|r| r.into_exponent().map_err(serde::de::Error::custom))
            .collect()
    }
}

pub fn format_exponent(e: &Exponent) -> String {
    if e.is_integer() {
        e.numer().to_string()
    } else {
        format!("{}/{}", e.numer(), e.denom())
    }
}

pub fn parse_exponent(s: &str) -> Result<Exponent> {
    let s = s.trim();
    let parse = |t: &str| {
        i64::from_str(t.trim()).map_err(|e| Error::Parse(format!("bad exponent {s:?}: {e}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse(d)?;
            if d == 0 {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Exponent::new(parse(n)?, d))
        }
        None => Ok(Exponent::from_integer(parse(s)?)),
    }
}

/// Parses `"n"` or `"n/d"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let parse = |t: &str| {
        BigInt::from_str(t.trim()).map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(parse(n)?, d))
        }
        None => Ok(BigRational::from_integer(parse(s)?)),
    }
}

/// Canonical `"num/den"` rendering (denominator always present).
pub fn format_rational(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if !g.gcd.abs().is_one() {
        return None;
    }
    let inv = g.x.mod_floor(m);
    Some(if g.gcd.is_negative() {
        (-inv).mod_floor(m)
    } else {
        inv
    })
}

/// Canonical residue of a p-integral rational in `[0, m)`.
pub fn rational_residue(numer: &BigInt, denom: &BigInt, m: &BigInt) -> Option<BigInt> {
    let inv = mod_inverse(&denom.mod_floor(m), m)?;
    Some((numer * inv).mod_floor(m))
}

pub fn prime_power(p: u64, k: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), k as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(q(9, 2).vp(3), Valuation::Finite(2));
        assert_eq!(q(1, 1).vp(2), Valuation::Finite(0));
        assert_eq!(q(0, 1).vp(5), Valuation::Infinity);
        assert_eq!(Ratio::new(9i64, 2).vp(3), Valuation::Finite(2));
        assert_eq!(Ratio::new(-5i128, 75).vp(5), Valuation::Finite(-1));
    }

    #[test]
    fn unit_examples() {
        assert!(PAdicScalar::from_ratio(2, 7, 3).unwrap().is_unit());
        assert!(!PAdicScalar::from_ratio(3, 1, 3).unwrap().is_unit());
        assert!(!PAdicScalar::from_ratio(1, 2, 2).unwrap().is_unit());
    }

    #[test]
    fn rejects_composite_prime() {
        assert_eq!(PAdicScalar::from_ratio(1, 1, 6), Err(Error::NotPrime(6)));
        assert!(PAdicScalar::from_ratio(1, 1, 1).is_err());
    }

    #[test]
    fn scaled_vp_multiplies_by_inertia() {
        let x = PAdicScalar::from_ratio(4, 3, 2).unwrap();
        assert_eq!(x.scaled_vp(3), Valuation::Finite(6));
    }

    #[test]
    fn infinity_orders_above_integers() {
        assert!(Valuation::Finite(i64::MAX) < Valuation::Infinity);
        assert_eq!(
            Valuation::Finite(2) + Valuation::Infinity,
            Valuation::Infinity
        );
    }

    #[test]
    fn residues() {
        let m = BigInt::from(3);
        assert_eq!(rational_residue(&1.into(), &2.into(), &m), Some(2.into()));
        assert_eq!(rational_residue(&1.into(), &3.into(), &m), None);
        let m = BigInt::from(27);
        assert_eq!(
            rational_residue(&(-1).into(), &2.into(), &m),
            Some(13.into())
        );
    }

    #[test]
    fn rational_strings() {
        assert_eq!(parse_rational("-3/6").unwrap(), q(-1, 2));
        assert_eq!(format_rational(&q(4, 1)), "4/1");
        assert!(parse_rational("1/0").is_err());
        assert_eq!(parse_exponent("-1/2").unwrap(), Exponent::new(-1, 2));
    }

    #[test]
    fn ppower_labels_commute() {
        let a = PPowerValue::with_label(Exponent::new(1, 2), "u");
        let b = PPowerValue::with_label(Exponent::from_integer(2), "eps");
        assert_eq!(a.clone() * b.clone(), b * a);
    }
}
