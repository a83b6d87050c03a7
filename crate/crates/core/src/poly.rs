//! Characteristic polynomials, Newton polygons and the Hensel split of a
//! monic integral polynomial into unit-root and positive-slope factors.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::PMatrix;
use crate::padic::{
    check_prime, format_exponent, mod_inverse, prime_power, rational_residue, Exponent,
    PAdicValued, Valuation,
};

/// Polynomial with exact rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigRational>,
    prime: u64,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>, prime: u64) -> Result<Self> {
        check_prime(prime)?;
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Ok(Self { coeffs, prime })
    }

    pub fn from_i64(coeffs: &[i64], prime: u64) -> Result<Self> {
        Self::new(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
            prime,
        )
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial has none.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_p_integral(self.prime))
    }

    /// Coefficients reduced into `[0, m)`.
    pub fn residues(&self, m: &BigInt) -> Result<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| {
                rational_residue(c.numer(), c.denom(), m)
                    .ok_or_else(|| Error::NotIntegral(c.to_string()))
            })
            .collect()
    }
}

/// `det(X·1 − U)` by the Faddeev–LeVerrier recursion.
pub fn charpoly(u: &PMatrix<BigRational>) -> IntPolynomial {
    let n = u.n();
    let p = u.prime();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut m = PMatrix::<BigRational>::from_fn(n, p, |_, _| BigRational::zero());
    for k in 1..=n {
        let prev = coeffs[n + 1 - k].clone();
        let mut am = u * &m;
        for d in 0..n {
            let v = am.get(d, d) + &prev;
            am.set(d, d, v);
        }
        m = am;
        let um = u * &m;
        let trace = (0..n).fold(BigRational::zero(), |acc, d| acc + um.get(d, d));
        coeffs[n - k] = -trace / BigRational::from_integer(BigInt::from(k));
    }
    IntPolynomial::new(coeffs, p).expect("prime already validated")
}

/// Root valuation of a Newton segment; zero roots have infinite valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Slope {
    Finite(Exponent),
    Infinite,
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Slope {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Slope::Finite(a), Slope::Finite(b)) => a.cmp(b),
            (Slope::Finite(_), Slope::Infinite) => Ordering::Less,
            (Slope::Infinite, Slope::Finite(_)) => Ordering::Greater,
            (Slope::Infinite, Slope::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Finite(e) => write!(f, "{}", format_exponent(e)),
            Slope::Infinite => write!(f, "+inf"),
        }
    }
}

impl Serialize for Slope {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Slope {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "+inf" {
            return Ok(Slope::Infinite);
        }
        crate::padic::parse_exponent(&s)
            .map(Slope::Finite)
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonSegment {
    pub slope: Slope,
    pub multiplicity: usize,
}

/// Root valuations with multiplicities, ascending, read off the lower convex
/// hull of `{(i, v_p(c_i))}`. A factor `X^m` appears last as an infinite slope.
pub fn newton_polygon(f: &IntPolynomial) -> Result<Vec<NewtonSegment>> {
    if f.is_zero() {
        return Err(Error::Precondition(
            "Newton polygon of the zero polynomial".into(),
        ));
    }
    let pts: Vec<(i64, i64)> = f
        .coeffs
        .iter()
        .enumerate()
        .filter_map(|(i, c)| match c.vp(f.prime) {
            Valuation::Finite(v) => Some((i as i64, v)),
            Valuation::Infinity => None,
        })
        .collect();
    let low = pts[0].0 as usize;

    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b if it lies on or above the segment a → pt
            let cross = (b.0 - a.0) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 - a.0);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }

    let mut segs: Vec<NewtonSegment> = hull
        .windows(2)
        .map(|w| {
            let (dx, dy) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            NewtonSegment {
                slope: Slope::Finite(-Ratio::new(dy, dx)),
                multiplicity: dx as usize,
            }
        })
        .collect();
    segs.reverse();
    if low > 0 {
        segs.push(NewtonSegment {
            slope: Slope::Infinite,
            multiplicity: low,
        });
    }
    Ok(segs)
}

/// Number of unit roots: the length of the slope-0 segment.
pub fn unit_root_count(segs: &[NewtonSegment]) -> usize {
    segs.iter()
        .filter(|s| s.slope == Slope::Finite(Exponent::zero()))
        .map(|s| s.multiplicity)
        .sum()
}

// Dense polynomials over Z/mZ, lowest degree first, canonical residues.

pub type ModPoly = Vec<BigInt>;

pub fn poly_trim(mut a: ModPoly) -> ModPoly {
    while a.last().is_some_and(Zero::is_zero) {
        a.pop();
    }
    a
}

pub fn poly_reduce(a: &[BigInt], m: &BigInt) -> ModPoly {
    poly_trim(a.iter().map(|c| c.mod_floor(m)).collect())
}

pub fn poly_add(a: &[BigInt], b: &[BigInt], m: &BigInt) -> ModPoly {
    let len = a.len().max(b.len());
    let z = BigInt::zero();
    poly_trim(
        (0..len)
            .map(|k| (a.get(k).unwrap_or(&z) + b.get(k).unwrap_or(&z)).mod_floor(m))
            .collect(),
    )
}

pub fn poly_sub(a: &[BigInt], b: &[BigInt], m: &BigInt) -> ModPoly {
    let len = a.len().max(b.len());
    let z = BigInt::zero();
    poly_trim(
        (0..len)
            .map(|k| (a.get(k).unwrap_or(&z) - b.get(k).unwrap_or(&z)).mod_floor(m))
            .collect(),
    )
}

pub fn poly_scale(a: &[BigInt], k: &BigInt, m: &BigInt) -> ModPoly {
    poly_trim(a.iter().map(|c| (c * k).mod_floor(m)).collect())
}

pub fn poly_mul(a: &[BigInt], b: &[BigInt], m: &BigInt) -> ModPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    poly_reduce(&out, m)
}

/// Division by `b` whose leading coefficient is a unit mod `m`.
pub fn poly_divrem(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Result<(ModPoly, ModPoly)> {
    let b = poly_reduce(b, m);
    let lead = b
        .last()
        .ok_or_else(|| Error::Internal("division by the zero polynomial".into()))?;
    let inv = mod_inverse(lead, m)
        .ok_or_else(|| Error::Internal("leading coefficient is not a unit".into()))?;
    let mut rem = poly_reduce(a, m);
    if rem.len() < b.len() {
        return Ok((Vec::new(), rem));
    }
    let mut quot = vec![BigInt::zero(); rem.len() - b.len() + 1];
    while rem.len() >= b.len() {
        let shift = rem.len() - b.len();
        let c = (rem.last().expect("nonempty") * &inv).mod_floor(m);
        for (k, bk) in b.iter().enumerate() {
            rem[shift + k] = (&rem[shift + k] - &c * bk).mod_floor(m);
        }
        quot[shift] = c;
        rem = poly_trim(rem);
    }
    Ok((poly_trim(quot), rem))
}

/// `(s, t)` with `s·a + t·b = 1` over `F_p`; errors unless `gcd(a, b) = 1`.
pub fn poly_bezout_fp(a: &[BigInt], b: &[BigInt], p: &BigInt) -> Result<(ModPoly, ModPoly)> {
    let (mut r0, mut r1) = (poly_reduce(a, p), poly_reduce(b, p));
    let (mut s0, mut s1): (ModPoly, ModPoly) = (vec![BigInt::one()], Vec::new());
    let (mut t0, mut t1): (ModPoly, ModPoly) = (Vec::new(), vec![BigInt::one()]);
    while !r1.is_empty() {
        let (q, r) = poly_divrem(&r0, &r1, p)?;
        let s2 = poly_sub(&s0, &poly_mul(&q, &s1, p), p);
        let t2 = poly_sub(&t0, &poly_mul(&q, &t1, p), p);
        (r0, r1) = (r1, r);
        (s0, s1) = (s1, s2);
        (t0, t1) = (t1, t2);
    }
    if r0.len() != 1 {
        return Err(Error::Internal("factors are not coprime mod p".into()));
    }
    let inv = mod_inverse(&r0[0], p).expect("nonzero constant mod p");
    Ok((poly_scale(&s0, &inv, p), poly_scale(&t0, &inv, p)))
}

/// `f ≡ f0·fplus (mod p^R)` with `f0` carrying the unit roots and `fplus ≡ X^m (mod p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitRootSplit {
    pub prime: u64,
    pub precision: u32,
    pub f: ModPoly,
    pub f0: ModPoly,
    pub fplus: ModPoly,
}

pub fn unit_root_split(f: &IntPolynomial, precision: u32) -> Result<UnitRootSplit> {
    if !f.is_monic() {
        return Err(Error::Precondition("polynomial must be monic".into()));
    }
    if !f.is_integral() {
        return Err(Error::NotIntegral("polynomial coefficient".into()));
    }
    if precision == 0 {
        return Err(Error::Precondition("precision must be positive".into()));
    }
    let p = f.prime;
    let pb = BigInt::from(p);
    let modulus = prime_power(p, precision);
    let big_f = f.residues(&modulus)?;
    let fbar = poly_reduce(&big_f, &pb);
    let m = fbar.iter().position(|c| !c.is_zero()).expect("monic");
    let gbar: ModPoly = fbar[m..].to_vec();
    let mut xm = vec![BigInt::zero(); m];
    xm.push(BigInt::one());

    let (f0, fplus) = if m == 0 {
        (big_f.clone(), vec![BigInt::one()])
    } else if gbar.len() == 1 {
        (vec![BigInt::one()], big_f.clone())
    } else {
        let (_s, t) = poly_bezout_fp(&gbar, &xm, &pb)?;
        let (mut g, mut h) = (gbar.clone(), xm.clone());
        for k in 1..precision {
            let pk = prime_power(p, k);
            let next = &pk * &pb;
            let diff = poly_sub(&big_f, &poly_mul(&g, &h, &next), &next);
            // diff ≡ 0 mod p^k; e = diff / p^k over F_p
            let e: ModPoly = poly_trim(diff.iter().map(|c| (c / &pk).mod_floor(&pb)).collect());
            let (_, a) = poly_divrem(&poly_mul(&e, &t, &pb), &gbar, &pb)?;
            let (c, rem) = poly_divrem(&poly_sub(&e, &poly_mul(&a, &xm, &pb), &pb), &gbar, &pb)?;
            if !rem.is_empty() {
                return Err(Error::Internal("Hensel correction is not exact".into()));
            }
            g = poly_add(&g, &poly_scale(&a, &pk, &next), &next);
            h = poly_add(&h, &poly_scale(&c, &pk, &next), &next);
        }
        (g, h)
    };
    Ok(UnitRootSplit {
        prime: p,
        precision,
        f: poly_reduce(&big_f, &modulus),
        f0: poly_reduce(&f0, &modulus),
        fplus: poly_reduce(&fplus, &modulus),
    })
}

impl UnitRootSplit {
    pub fn modulus(&self) -> BigInt {
        prime_power(self.prime, self.precision)
    }

    pub fn unit_degree(&self) -> usize {
        self.f0.len().saturating_sub(1)
    }

    /// `f0·fplus ≡ f`, `fplus ≡ X^m` and `f0(0)` a unit, all mod the right powers of `p`.
    pub fn certificate_holds(&self) -> bool {
        let m = self.modulus();
        let pb = BigInt::from(self.prime);
        let product_ok = poly_mul(&self.f0, &self.fplus, &m) == self.f;
        let fplus_bar = poly_reduce(&self.fplus, &pb);
        let xm_ok = fplus_bar.len() == self.fplus.len()
            && fplus_bar.iter().rev().skip(1).all(Zero::is_zero);
        let f0_ok = self.f0.first().is_some_and(|c| !c.mod_floor(&pb).is_zero());
        product_ok && xm_ok && f0_ok
    }

    /// The idempotent of `Z/p^R[X]/(f)` that is `1` mod `f0` and `0` mod `fplus`,
    /// with Bézout cofactors: returns `(E, a, b)` where `E = b·fplus` and
    /// `1 − E = a·f0`.
    pub fn idempotent(&self) -> Result<(ModPoly, ModPoly, ModPoly)> {
        let m = self.modulus();
        let pb = BigInt::from(self.prime);
        if self.unit_degree() == 0 {
            return Ok((Vec::new(), vec![BigInt::one()], Vec::new()));
        }
        if self.fplus.len() == 1 {
            return Ok((vec![BigInt::one()], Vec::new(), vec![BigInt::one()]));
        }
        let (_, t) = poly_bezout_fp(&self.f0, &self.fplus, &pb)?;
        let reduce = |a: &[BigInt]| -> Result<ModPoly> { Ok(poly_divrem(a, &self.f, &m)?.1) };
        let mut e = reduce(&poly_mul(&t, &self.fplus, &m))?;
        let three = BigInt::from(3);
        let two = BigInt::from(2);
        for _ in 0..=2 * self.precision.max(1).ilog2() + 4 {
            let e2 = reduce(&poly_mul(&e, &e, &m))?;
            if e2 == e {
                break;
            }
            let e3 = reduce(&poly_mul(&e2, &e, &m))?;
            e = poly_sub(&poly_scale(&e2, &three, &m), &poly_scale(&e3, &two, &m), &m);
        }
        if reduce(&poly_mul(&e, &e, &m))? != e {
            return Err(Error::Internal("idempotent lift did not converge".into()));
        }
        let (b, rem_b) = poly_divrem(&e, &self.fplus, &m)?;
        let one_minus = poly_sub(&[BigInt::one()], &e, &m);
        let (a, rem_a) = poly_divrem(&one_minus, &self.f0, &m)?;
        if !rem_a.is_empty() || !rem_b.is_empty() {
            return Err(Error::Internal("Bezout cofactors are not exact".into()));
        }
        Ok((e, a, b))
    }
}

pub fn format_mod_poly(a: &[BigInt]) -> Vec<String> {
    a.iter().map(|c| c.to_string()).collect()
}

/// `a ≡ b` as integer polynomials mod `m`.
pub fn poly_congruent(a: &[BigInt], b: &[BigInt], m: &BigInt) -> bool {
    poly_reduce(a, m) == poly_reduce(b, m)
}
