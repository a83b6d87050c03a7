//! The exact scalar abstraction the matrix layer is generic over.
//!
//! Only exact fields are admitted: [`BigRational`] for unbounded work and
//! `Ratio<i64>` / `Ratio<i128>` for the hot loops of the verification grids,
//! where magnitudes stay tiny.

use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, ToPrimitive};

use crate::padic::{rational_residue, PAdicValued};

pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Num
    + Neg<Output = Self>
    + PAdicValued
    + Send
    + Sync
    + 'static
{
    fn from_i64(v: i64) -> Self;

    fn to_big_rational(&self) -> BigRational;

    /// `None` when the value does not fit the representation.
    fn from_big_rational(x: &BigRational) -> Option<Self>;

    /// Canonical residue in `[0, m)`, `None` if the denominator is not invertible mod `m`.
    fn residue(&self, m: u64) -> Option<u64> {
        let x = self.to_big_rational();
        rational_residue(x.numer(), x.denom(), &BigInt::from(m)).and_then(|r| r.to_u64())
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(v.into())
    }

    fn to_big_rational(&self) -> BigRational {
        self.clone()
    }

    fn from_big_rational(x: &BigRational) -> Option<Self> {
        Some(x.clone())
    }
}

macro_rules! impl_scalar_machine {
    ($($t:ty),*) => {$(
        impl Scalar for Ratio<$t> {
            fn from_i64(v: i64) -> Self {
                Ratio::from_integer(v as $t)
            }

            fn to_big_rational(&self) -> BigRational {
                BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
            }

            fn from_big_rational(x: &BigRational) -> Option<Self> {
                let n: $t = x.numer().try_into().ok()?;
                let d: $t = x.denom().try_into().ok()?;
                Some(Ratio::new(n, d))
            }

            fn residue(&self, m: u64) -> Option<u64> {
                let m = m as i128;
                let n = (*self.numer() as i128).mod_floor(&m);
                let d = (*self.denom() as i128).mod_floor(&m);
                let g = d.extended_gcd(&m);
                if g.gcd != 1 {
                    return None;
                }
                let inv = g.x.mod_floor(&m);
                Some(((n * inv).mod_floor(&m)) as u64)
            }
        }
    )*};
}

impl_scalar_machine!(i64, i128);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_agrees_across_representations() {
        for (n, d) in [(1i64, 2i64), (-7, 5), (13, 4), (0, 1)] {
            let big = BigRational::new(n.into(), d.into());
            let small = Ratio::<i128>::new(n as i128, d as i128);
            assert_eq!(big.residue(27), small.residue(27));
        }
        assert_eq!(Ratio::<i64>::new(1, 3).residue(9), None);
    }

    #[test]
    fn round_trip_small() {
        let x = BigRational::new(3.into(), (-8).into());
        let s = Ratio::<i64>::from_big_rational(&x).unwrap();
        assert_eq!(s.to_big_rational(), x);
    }
}
