//! Exact square matrices and the subgroup predicates of `GL_n(Q_p)`.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::padic::{format_rational, parse_rational, prime_power, rational_residue, Valuation};
use crate::scalar::Scalar;
use crate::shape::{BlockShape, Cell};

/// `n × n` matrix of exact scalars, valued at a fixed prime.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PMatrix<T> {
    n: usize,
    prime: u64,
    entries: Vec<T>,
}

impl<T: Scalar> PMatrix<T> {
    pub fn from_fn(n: usize, prime: u64, f: impl Fn(usize, usize) -> T) -> Self {
        let entries = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self { n, prime, entries }
    }

    pub fn from_rows(rows: Vec<Vec<T>>, prime: u64) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(
                "matrix rows must form a square".into(),
            ));
        }
        Ok(Self {
            n,
            prime,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64_rows(rows: &[&[i64]], prime: u64) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| T::from_i64(v)).collect())
                .collect(),
            prime,
        )
    }

    pub fn identity(n: usize, prime: u64) -> Self {
        Self::from_fn(n, prime, |r, c| if r == c { T::one() } else { T::zero() })
    }

    pub fn diagonal(diag: Vec<T>, prime: u64) -> Self {
        let n = diag.len();
        let mut m = Self::from_fn(n, prime, |_, _| T::zero());
        for (k, d) in diag.into_iter().enumerate() {
            m.entries[k * n + k] = d;
        }
        m
    }

    /// `diag(p^{v_1}, …, p^{v_n})`.
    pub fn p_power_diagonal(vals: &[i64], prime: u64) -> Self {
        let p = T::from_i64(prime as i64);
        let diag = vals
            .iter()
            .map(|&v| {
                let mut x = T::one();
                for _ in 0..v.unsigned_abs() {
                    x = x * p.clone();
                }
                if v < 0 {
                    T::one() / x
                } else {
                    x
                }
            })
            .collect();
        Self::diagonal(diag, prime)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.entries[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.entries[r * self.n + c] = v;
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, self.prime, |r, c| self.get(c, r).clone())
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|r| {
            (0..self.n).all(|c| *self.get(r, c) == if r == c { T::one() } else { T::zero() })
        })
    }

    /// Row-reduces a copy; returns `(det, inverse)` with the inverse when `det ≠ 0`.
    fn eliminate(&self, want_inverse: bool) -> (T, Option<Self>) {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut inv = Self::identity(n, self.prime).entries;
        let mut det = T::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[r * n + col].is_zero()) else {
                return (T::zero(), None);
            };
            if piv != col {
                for k in 0..n {
                    a.swap(piv * n + k, col * n + k);
                    inv.swap(piv * n + k, col * n + k);
                }
                det = -det;
            }
            let pv = a[col * n + col].clone();
            det = det * pv.clone();
            for k in 0..n {
                a[col * n + k] = a[col * n + k].clone() / pv.clone();
                if want_inverse {
                    inv[col * n + k] = inv[col * n + k].clone() / pv.clone();
                }
            }
            for r in 0..n {
                if r == col || a[r * n + col].is_zero() {
                    continue;
                }
                let f = a[r * n + col].clone();
                for k in 0..n {
                    let s = a[col * n + k].clone() * f.clone();
                    a[r * n + k] = a[r * n + k].clone() - s;
                    if want_inverse {
                        let s = inv[col * n + k].clone() * f.clone();
                        inv[r * n + k] = inv[r * n + k].clone() - s;
                    }
                }
            }
        }
        let inverse = want_inverse.then(|| Self {
            n,
            prime: self.prime,
            entries: inv,
        });
        (det, inverse)
    }

    pub fn det(&self) -> T {
        self.eliminate(false).0
    }

    pub fn inverse(&self) -> Option<Self> {
        self.eliminate(true).1
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|x| x.is_p_integral(self.prime))
    }

    /// Membership in `GL_n(Z_p)`: integral entries and `v_p(det) = 0`.
    pub fn is_integral_unit(&self) -> bool {
        if !self.is_integral() {
            return false;
        }
        // for integral matrices det is a unit iff it is nonzero mod p
        let p = self.prime;
        let residues: Vec<u64> = self
            .entries
            .iter()
            .map(|x| x.residue(p).expect("integral entries reduce"))
            .collect();
        det_nonzero_mod_prime(&residues, self.n, p)
    }

    /// `v_p(x − target) ≥ r`.
    fn congruent(x: &T, target: &T, p: u64, r: u32) -> bool {
        (x.clone() - target.clone()).vp(p) >= Valuation::Finite(r as i64)
    }

    /// Membership in the level-`r` parahoric `I^0_{w,r}` (`pro_p = false`) or
    /// its pro-p radical `I_{w,r}` (`pro_p = true`).
    pub fn in_iwahori(&self, shape: &BlockShape, r: u32, pro_p: bool) -> bool {
        if self.n != shape.n() || !self.is_integral_unit() {
            return false;
        }
        if r == 0 {
            return true;
        }
        let p = self.prime;
        let (zero, one) = (T::zero(), T::one());
        for row in 0..self.n {
            for col in 0..self.n {
                let x = self.get(row, col);
                let ok = match shape.cell(row, col) {
                    Cell::Unipotent => true,
                    Cell::Opposite => Self::congruent(x, &zero, p, r),
                    Cell::Diagonal => !pro_p || Self::congruent(x, &one, p, r),
                    Cell::LeviOff => !pro_p || Self::congruent(x, &zero, p, r),
                };
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    /// Entrywise reduction into `[0, p^r)`.
    pub fn reduce_mod(&self, r: u32) -> Result<ModMatrix> {
        let m = prime_power(self.prime, r);
        let entries = self
            .entries
            .iter()
            .map(|x| {
                let q = x.to_big_rational();
                rational_residue(q.numer(), q.denom(), &m)
                    .ok_or_else(|| Error::NotIntegral(x.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ModMatrix {
            n: self.n,
            modulus: m,
            entries,
        })
    }

    /// `t⁻¹ · self · t` for `t = diag(p^{v})`, computed entrywise.
    pub fn conjugate_by_p_diagonal(&self, vals: &[i64]) -> Self {
        let p = T::from_i64(self.prime as i64);
        let pow = |e: i64| {
            let mut x = T::one();
            for _ in 0..e.unsigned_abs() {
                x = x * p.clone();
            }
            if e < 0 {
                T::one() / x
            } else {
                x
            }
        };
        Self::from_fn(self.n, self.prime, |r, c| {
            self.get(r, c).clone() * pow(vals[c] - vals[r])
        })
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> PMatrix<U> {
        PMatrix {
            n: self.n,
            prime: self.prime,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn to_big(&self) -> PMatrix<BigRational> {
        self.map(|x| x.to_big_rational())
    }
}

impl PMatrix<BigRational> {
    /// Converts to a smaller representation if every entry fits.
    pub fn try_to<U: Scalar>(&self) -> Option<PMatrix<U>> {
        let entries = self
            .entries
            .iter()
            .map(U::from_big_rational)
            .collect::<Option<Vec<_>>>()?;
        Some(PMatrix {
            n: self.n,
            prime: self.prime,
            entries,
        })
    }
}

impl<'a, T: Scalar> Mul<&'a PMatrix<T>> for &'a PMatrix<T> {
    type Output = PMatrix<T>;

    fn mul(self, rhs: &'a PMatrix<T>) -> PMatrix<T> {
        assert_eq!(self.n, rhs.n, "dimension mismatch in product");
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                let mut acc = T::zero();
                for k in 0..n {
                    let a = &self.entries[r * n + k];
                    if a.is_zero() {
                        continue;
                    }
                    acc = acc + a.clone() * rhs.entries[k * n + c].clone();
                }
                out.push(acc);
            }
        }
        PMatrix {
            n,
            prime: self.prime,
            entries: out,
        }
    }
}

impl<T: Scalar> fmt::Debug for PMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, row) in self.entries.chunks(self.n).enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "] (p={})", self.prime)
    }
}

/// JSON form: `{"p": 3, "rows": [["1/1","1/2"],["0/1","1/1"]]}`.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    p: u64,
    rows: Vec<Vec<String>>,
}

impl Serialize for PMatrix<BigRational> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            p: self.prime,
            rows: rational_rows_to_strings(&self.rows()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PMatrix<BigRational> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        let rows = rational_rows_from_strings(&j.rows).map_err(serde::de::Error::custom)?;
        PMatrix::from_rows(rows, j.p).map_err(serde::de::Error::custom)
    }
}

pub fn rational_rows_to_strings(rows: &[Vec<BigRational>]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| r.iter().map(format_rational).collect())
        .collect()
}

pub fn rational_rows_from_strings(rows: &[Vec<String>]) -> Result<Vec<Vec<BigRational>>> {
    rows.iter()
        .map(|r| r.iter().map(|s| parse_rational(s)).collect())
        .collect()
}

/// Determinant test over `F_p` on residues already reduced mod a power of `p`.
pub fn det_nonzero_mod_prime(entries: &[u64], n: usize, p: u64) -> bool {
    let mut a: Vec<u64> = entries.iter().map(|&x| x % p).collect();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| a[r * n + col] != 0) else {
            return false;
        };
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
        }
        let inv = inverse_mod_prime(a[col * n + col], p);
        for r in col + 1..n {
            let f = a[r * n + col] * inv % p;
            if f == 0 {
                continue;
            }
            for k in col..n {
                a[r * n + k] = (a[r * n + k] + p * p - f * a[col * n + k] % p) % p;
            }
        }
    }
    true
}

pub fn inverse_mod_prime(x: u64, p: u64) -> u64 {
    // Fermat: x^(p-2)
    let mut base = x % p;
    let mut e = p - 2;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// Rank over `F_p` of a residue matrix.
pub fn rank_mod_prime(entries: &[BigInt], n: usize, p: u64) -> usize {
    let pb = BigInt::from(p);
    let mut a: Vec<u64> = entries
        .iter()
        .map(|x| u64::try_from(x.mod_floor(&pb)).expect("residue fits"))
        .collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(piv) = (rank..n).find(|&r| a[r * n + col] != 0) else {
            continue;
        };
        for k in 0..n {
            a.swap(piv * n + k, rank * n + k);
        }
        let inv = inverse_mod_prime(a[rank * n + col], p);
        for r in 0..n {
            if r == rank {
                continue;
            }
            let f = a[r * n + col] * inv % p;
            if f == 0 {
                continue;
            }
            for k in 0..n {
                a[r * n + k] = (a[r * n + k] + p * p - f * a[rank * n + k] % p) % p;
            }
        }
        rank += 1;
    }
    rank
}

/// Square matrix over `Z/mZ` with canonical entries in `[0, m)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModMatrix {
    n: usize,
    modulus: BigInt,
    entries: Vec<BigInt>,
}

impl ModMatrix {
    pub fn from_fn(n: usize, modulus: BigInt, f: impl Fn(usize, usize) -> BigInt) -> Self {
        let entries = (0..n * n)
            .map(|k| f(k / n, k % n).mod_floor(&modulus))
            .collect();
        Self {
            n,
            modulus,
            entries,
        }
    }

    pub fn identity(n: usize, modulus: BigInt) -> Self {
        Self::from_fn(n, modulus, |r, c| {
            if r == c {
                BigInt::one()
            } else {
                BigInt::zero()
            }
        })
    }

    pub fn zero(n: usize, modulus: BigInt) -> Self {
        Self::from_fn(n, modulus, |_, _| BigInt::zero())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.n + c]
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, self.modulus.clone(), |r, c| self.get(c, r).clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_fn(self.n, self.modulus.clone(), |r, c| {
            self.get(r, c) + other.get(r, c)
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_fn(self.n, self.modulus.clone(), |r, c| {
            self.get(r, c) - other.get(r, c)
        })
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::from_fn(self.n, self.modulus.clone(), |r, c| self.get(r, c) * k)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        Self::from_fn(n, self.modulus.clone(), |r, c| {
            (0..n).map(|k| self.get(r, k) * other.get(k, c)).sum()
        })
    }

    pub fn pow(&self, e: &num_bigint::BigUint) -> Self {
        let mut acc = Self::identity(self.n, self.modulus.clone());
        let mut base = self.clone();
        for bit in 0..e.bits() {
            if e.bit(bit) {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
        }
        acc
    }

    /// Same entries reduced to a smaller modulus dividing the current one.
    pub fn reduce(&self, modulus: &BigInt) -> Self {
        Self::from_fn(self.n, modulus.clone(), |r, c| self.get(r, c).clone())
    }

    pub fn rank_mod(&self, p: u64) -> usize {
        rank_mod_prime(&self.entries, self.n, p)
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.entries
            .chunks(self.n)
            .map(|r| r.iter().map(|x| x.to_string()).collect())
            .collect()
    }
}

impl fmt::Debug for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} mod {}", self.to_strings(), self.modulus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type Q = PMatrix<BigRational>;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn integral_unit_examples() {
        assert!(Q::identity(3, 5).is_integral_unit());
        assert!(!Q::from_i64_rows(&[&[3, 0], &[0, 1]], 3)
            .unwrap()
            .is_integral_unit());
        let m = Q::from_rows(vec![vec![q(1, 1), q(1, 2)], vec![q(0, 1), q(1, 1)]], 3).unwrap();
        assert!(m.is_integral_unit());
        let m = Q::from_rows(vec![vec![q(1, 1), q(1, 3)], vec![q(0, 1), q(1, 1)]], 3).unwrap();
        assert!(!m.is_integral_unit());
    }

    #[test]
    fn iwahori_examples() {
        let borel = BlockShape::borel(1, 1);
        assert!(Q::identity(2, 3).in_iwahori(&borel, 1, true));
        let m = Q::from_i64_rows(&[&[1, 0], &[3, 1]], 3).unwrap();
        assert!(m.in_iwahori(&borel, 1, false));
        assert!(m.in_iwahori(&borel, 1, true));
        assert!(!m.in_iwahori(&borel, 2, false));
        let m = Q::from_i64_rows(&[&[1, 0], &[1, 1]], 3).unwrap();
        assert!(!m.in_iwahori(&borel, 1, false));
        // I^0 but not pro-p: diagonal 2 ≢ 1 mod 3
        let m = Q::from_i64_rows(&[&[2, 5], &[0, 1]], 3).unwrap();
        assert!(m.in_iwahori(&borel, 1, false));
        assert!(!m.in_iwahori(&borel, 1, true));
    }

    #[test]
    fn level_zero_is_integral_unit() {
        let s = BlockShape::from_parts(&[1], &[1, 1]).unwrap();
        let m = Q::from_i64_rows(&[&[1, 1, 0], &[1, 0, 1], &[0, 1, 1]], 2).unwrap();
        assert_eq!(m.in_iwahori(&s, 0, true), m.is_integral_unit());
        assert!(!m.is_integral_unit());
        let m = Q::from_i64_rows(&[&[1, 1, 0], &[1, 0, 1], &[0, 1, 0]], 3).unwrap();
        assert!(m.in_iwahori(&s, 0, false));
    }

    #[test]
    fn reduction_examples() {
        let m = Q::from_rows(vec![vec![q(1, 1), q(1, 2)], vec![q(0, 1), q(1, 1)]], 3).unwrap();
        assert_eq!(
            m.reduce_mod(1).unwrap().to_strings(),
            vec![vec!["1", "2"], vec!["0", "1"]]
        );
        let id = Q::identity(2, 3).reduce_mod(2).unwrap();
        assert_eq!(id, ModMatrix::identity(2, 9.into()));
        let m = Q::from_i64_rows(&[&[1, 3], &[0, 1]], 3).unwrap();
        assert_eq!(m.reduce_mod(1).unwrap(), ModMatrix::identity(2, 3.into()));
        let bad = Q::from_rows(vec![vec![q(1, 3), q(0, 1)], vec![q(0, 1), q(1, 1)]], 3).unwrap();
        assert!(matches!(bad.reduce_mod(1), Err(Error::NotIntegral(_))));
    }

    #[test]
    fn inverse_and_det() {
        let m = Q::from_i64_rows(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]], 5).unwrap();
        assert_eq!(m.det(), q(18, 1));
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).is_identity());
        let s = m.try_to::<Ratio<i64>>().unwrap();
        assert_eq!(s.det(), Ratio::from_integer(18));
        assert!(Q::from_i64_rows(&[&[1, 2], &[2, 4]], 3)
            .unwrap()
            .inverse()
            .is_none());
    }

    #[test]
    fn diagonal_conjugation_matches_products() {
        let m = Q::from_i64_rows(&[&[1, 4, 2], &[3, 1, 5], &[9, 6, 1]], 3).unwrap();
        let vals = [1, 0, 1];
        let t = Q::p_power_diagonal(&vals, 3);
        let direct = &(&t.inverse().unwrap() * &m) * &t;
        assert_eq!(direct, m.conjugate_by_p_diagonal(&vals));
    }

    #[test]
    fn json_uses_num_den_strings() {
        let m = Q::from_rows(vec![vec![q(1, 1), q(-1, 2)], vec![q(0, 1), q(3, 1)]], 3).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"p":3,"rows":[["1/1","-1/2"],["0/1","3/1"]]}"#);
        assert_eq!(serde_json::from_str::<Q>(&s).unwrap(), m);
    }

    #[test]
    fn rank_over_fp() {
        let e: Vec<BigInt> = [1, 13, 0, 0].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(rank_mod_prime(&e, 2, 3), 1);
        let e: Vec<BigInt> = [3, 6, 9, 3].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(rank_mod_prime(&e, 2, 3), 0);
    }
}
