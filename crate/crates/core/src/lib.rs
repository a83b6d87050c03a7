//! Exact p-adic linear algebra around `P`-ordinary vectors for `GL_n`.
//!
//! All arithmetic is exact. The matrix layer is generic over [`Scalar`]
//! (exact rational fields only); [`QMatrix`] is the unbounded default and
//! [`SmallMatrix`] the fixed-width variant used inside enumeration loops.

pub mod enumerate;
pub mod error;
pub mod hecke;
pub mod matrix;
pub mod modulus;
pub mod ordinarity;
pub mod padic;
pub mod poly;
pub mod projector;
pub mod scalar;
pub mod shape;
pub mod weight;
pub mod weyl;

pub use enumerate::{enumerate, FiniteGroupEnum, GroupKind};
pub use error::{Error, Result};
pub use hecke::{
    coset_reps, iwahori_factorize, make_t, verify_double_coset, CosetReport, HeckeElement, Sign,
};
pub use matrix::{ModMatrix, PMatrix};
pub use ordinarity::{
    ordinarity_verdict, CentralCharacter, OrdinarityConfig, OrdinarityReport, Verdict,
};
pub use padic::{Exponent, PAdicScalar, PAdicValued, PPowerValue, Valuation};
pub use poly::{IntPolynomial, NewtonSegment, Slope};
pub use projector::{ordinary_projector, UnitProjector};
pub use scalar::Scalar;
pub use shape::{BlockShape, Cell, Partition, PositionSet, ShapeParams};
pub use weight::{SigmaWeight, WeightChar};
pub use weyl::WeylElement;

/// Unbounded exact rationals.
pub type Rational = num_rational::BigRational;
/// Fixed-width rationals for enumeration hot loops.
pub type SmallRational = num_rational::Ratio<i128>;
pub type QMatrix = PMatrix<Rational>;
pub type SmallMatrix = PMatrix<SmallRational>;
